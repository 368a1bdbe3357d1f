#include "wornsim/simulation.hpp"

#include <algorithm>
#include <random>

#include "wornsim/errors.hpp"
#include "wornsim/models.hpp"
#include "wornsim/rng.hpp"

namespace wornsim {

namespace {

constexpr std::uint64_t kImuStream = 1000;
constexpr std::uint64_t kCalibrationStream = 2000;

// Calibration poses: the robot visits random configurations around home while
// the tracker measures its effector.
Transform calibrate_base(const Manipulator& robot, const SensingConfig& sensing, std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, {kCalibrationStream}));
  std::uniform_real_distribution<double> spread(-0.8, 0.8);
  std::vector<std::pair<Transform, Transform>> points;
  for (int i = 0; i < sensing.calibration_points; ++i) {
    JointVector q(static_cast<Eigen::Index>(robot.chain.dof()));
    for (Eigen::Index j = 0; j < q.size(); ++j) q[j] = spread(rng);
    const Transform local = forward_kinematics(robot.chain, q);
    const Transform world = compose(local, robot.base_pose);
    const MocapSample seen =
        mocap_measure(world, sensing.sigma_t, 0.0, derive_seed(seed, {kCalibrationStream, std::uint64_t(i) + 1}));
    points.emplace_back(local, seen.pose);
  }
  return calibrate_robot_to_world(points).robot_to_world;
}

}  // namespace

Simulation::Simulation(Scenario scenario, bool live)
    : scenario_(std::move(scenario)),
      live_(live),
      human_(make_human_model(scenario_.body)),
      robot_{make_manipulator(), Transform(frames::kRobotBase, frames::kWorld, scenario_.robot.base)},
      believed_(robot_),
      believed_base_(robot_.base_pose),
      sensing_seed_(derive_seed(scenario_.seed, {scenario_.sensing.seed})),
      last_attachment_(scenario_.attachment.name()) {
  scenario_.validate();
  if (scenario_.sensing.calibration_points >= 3) {
    believed_base_ = calibrate_base(robot_, scenario_.sensing, sensing_seed_);
    believed_.base_pose = believed_base_;
  }
  if (scenario_.sensing.backend == SensingBackend::kImu) {
    drift_.emplace(scenario_.sensing.drift_rate, sensing_seed_);
  }
  events_ = scenario_.events;
  std::stable_sort(events_.begin(), events_.end(),
                   [](const TimedCommand& a, const TimedCommand& b) { return a.t < b.t; });
  servo_ = make_servo_state(believed_, scenario_.robot.initial_q);
}

void Simulation::enqueue(LimbCommand command) { queue_.push_back(std::move(command)); }

void Simulation::set_servo_config(const ServoConfig& cfg) {
  Scenario candidate = scenario_;
  candidate.servo = cfg;
  candidate.validate();
  scenario_.servo = cfg;
}

BodyPoses Simulation::sense(const BodyPoses& truth) {
  const SensingConfig& cfg = scenario_.sensing;
  const double t = time();
  if (cfg.backend == SensingBackend::kMocap) {
    BodyPoses sensed = truth;
    const auto tracked = human::attachable_frames();
    for (std::size_t i = 0; i < tracked.size(); ++i) {
      const std::uint64_t seed = derive_seed(sensing_seed_, {std::uint64_t(tick_), std::uint64_t(i)});
      sensed[tracked[i]] = mocap_measure(truth.at(tracked[i]), cfg.sigma_t, cfg.sigma_r, seed, t).pose;
    }
    return sensed;
  }
  const Transform& head = truth.at(human::kHead);
  const Transform headset(head.from(), head.to(), Rigid::translate(drift_->bias_at(t)) * head.motion());
  const auto imus = synthesize_imus(truth, previous_truth_ ? &*previous_truth_ : nullptr, scenario_.dt, cfg.sigma_r,
                                    derive_seed(sensing_seed_, {std::uint64_t(tick_), kImuStream}), t);
  return reconstruct_upper_body(headset, imus, scenario_.body).frames;
}

void Simulation::apply(const LimbCommand& command, const BodyPoses& sensed) {
  if (const auto* twist = std::get_if<AuxTwistCommand>(&command)) {
    held_twist_ = twist->twist;
  } else if (const auto* gripper = std::get_if<GripperCommand>(&command)) {
    limb_.gripper = gripper->closed;
  } else if (const auto* att = std::get_if<AttachCommand>(&command)) {
    limb_ = attach(limb_, att->frame, sensed, att->mode);
  } else {
    limb_ = detach(limb_);
  }
}

LogRow Simulation::step() {
  const double t = time();
  const double body_t = live_ ? std::min(t, scenario_.duration) : t;
  const BodyState state = eval_trajectory(scenario_.human, scenario_.body, body_t, scenario_.duration);
  const BodyPoses truth = human_.frame_poses(state.q, state.root_pose);
  const BodyPoses sensed = sense(truth);
  previous_truth_ = truth;

  rejected_.clear();
  if (tick_ == 0) {
    limb_ = make_virtual_limb(scenario_.attachment, scenario_.linkage, sensed);
  } else if (limb_.attached() && !held_twist_.isZero(0.0)) {
    limb_ = apply_aux_command(limb_, AuxiliaryCommand{held_twist_, limb_.gripper, t}, scenario_.dt,
                              scenario_.aux_caps);
  }
  // Tolerance keeps an event at t = k*dt from slipping a tick on rounding.
  while (next_event_ < events_.size() && events_[next_event_].t <= t + 1e-9 * scenario_.dt) {
    apply(events_[next_event_].command, sensed);
    ++next_event_;
  }
  for (std::size_t i = 0; !queue_.empty(); ++i) {
    const LimbCommand command = std::move(queue_.front());
    queue_.pop_front();
    try {
      apply(command, sensed);
    } catch (const Error& e) {
      rejected_.push_back({i, e.what()});
    }
  }
  limb_ = refresh(limb_, sensed);
  if (limb_.attached()) last_attachment_ = limb_.attachment->name();

  if (tick_ % scenario_.servo_every() == 0) {
    const ServoTick update =
        servo_tick(servo_, believed_, limb_.last_world_pose, scenario_.servo, scenario_.servo.control_period);
    servo_ = update.state;
    flags_ = update.flags;
  }

  LogRow row;
  row.tick = tick_;
  row.t = t;
  row.attached = limb_.attached();
  row.attachment = last_attachment_;
  row.gripper = limb_.gripper;
  row.flags = flags_;
  row.body_q = state.q;
  row.body_pose = attachment_pose(sensed, FrameId{last_attachment_});
  row.linkage = linkage_pose(limb_.linkage);
  row.virtual_world = limb_.last_world_pose;
  row.filtered = servo_.filtered_target;
  row.robot_q = servo_.q;
  row.robot_world = robot_.tip_world(servo_.q);
  row.error = tracking_metrics(row.robot_world, row.virtual_world);
  ++tick_;
  return row;
}

SimLog run(const Scenario& scenario) {
  Simulation sim(scenario);
  SimLog log{scenario.name, scenario.dt, scenario.display, {}};
  log.rows.reserve(static_cast<std::size_t>(scenario.tick_count()) + 1);
  while (!sim.finished()) log.rows.push_back(sim.step());
  return log;
}

}  // namespace wornsim
