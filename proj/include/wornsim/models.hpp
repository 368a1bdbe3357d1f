#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "wornsim/kinematics.hpp"

namespace wornsim {

/// Segment lengths (meters) of the upper-body model and the nominal pelvis
/// pose in the world.
struct BodyModel {
  double trunk = 0.5;
  double upper_arm = 0.3;
  double forearm = 0.25;
  double neck = 0.2;
  double shoulder_offset = 0.2;  // lateral, toward -y (right shoulder)
  Rigid root = Rigid::translate(0.0, 0.0, 1.0);

  /// Throws InvalidModel unless every length is positive.
  void validate() const;
};

namespace human {

inline const FrameId kPelvis{"pelvis"};
inline const FrameId kTrunk{"trunk"};
inline const FrameId kUpperArm{"upper_arm"};
inline const FrameId kForearm{"forearm"};
inline const FrameId kHand{"hand"};
inline const FrameId kHead{"head"};

/// Joint order of the human joint vector.
inline constexpr std::array<std::string_view, 9> kJointNames = {
    "trunk_yaw",     "trunk_pitch",  "trunk_roll", "shoulder_flex", "shoulder_abd",
    "shoulder_rot",  "elbow_flex",   "neck_pitch", "neck_yaw"};

inline constexpr std::size_t kDof = kJointNames.size();

/// Frames a virtual limb may attach to.
std::vector<FrameId> attachable_frames();

}  // namespace human

/// Upper body: pelvis -> trunk(3R: z,y,x) -> shoulder(3R: y,x,z) -> elbow(1R: y)
/// -> hand, plus the head branch trunk -> neck(2R: y,z) -> head. Segments hang
/// along -z (arm) and +z (trunk, neck) at the zero pose.
KinematicTree make_human_model(const BodyModel& body = {});

/// 6R manipulator with 0.9 m of summed link length, based at robot_base:
/// base yaw (z), shoulder (y), elbow (y, forearm bent 90 deg forward at
/// zero), wrist roll (z), wrist pitch (y), wrist yaw (x). At q = 0 the tip
/// E_R sits at (0.35, 0, 0.55) in robot_base with rotation rot_y(90 deg).
KinematicChain make_manipulator();

inline constexpr double kManipulatorReach = 0.9;

struct StandardModels {
  KinematicTree human;
  KinematicChain manipulator;
};

StandardModels standard_models();

}  // namespace wornsim
