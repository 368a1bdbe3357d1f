#include "wornsim/log_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "wornsim/errors.hpp"
#include "wornsim/models.hpp"

namespace wornsim {

namespace {

constexpr const char* kPoseSuffixes[] = {"tx", "ty", "tz", "qw", "qx", "qy", "qz"};

std::vector<std::string> robot_joint_names() {
  const KinematicChain robot = make_manipulator();
  std::vector<std::string> names;
  for (const JointSpec& joint : robot.joints()) names.push_back(joint.name);
  return names;
}

void pose_columns(std::vector<std::string>& cols, const std::string& prefix) {
  for (const char* suffix : kPoseSuffixes) cols.push_back(prefix + "_" + suffix);
}

class CsvLine {
 public:
  explicit CsvLine(std::ostream& out) : out_(out) {}
  ~CsvLine() { out_ << '\n'; }

  void text(const std::string& s) { sep() << s; }
  void flag(bool b) { sep() << (b ? '1' : '0'); }
  void integer(long v) { sep() << v; }
  void number(double v) { sep() << format_double(v); }
  void pose(const Transform& p) {
    const Rigid& r = p.motion();
    for (double v : {r.translation.x(), r.translation.y(), r.translation.z(), r.rotation.w(), r.rotation.x(),
                     r.rotation.y(), r.rotation.z()}) {
      number(v);
    }
  }
  void joints(const JointVector& q) {
    for (Eigen::Index i = 0; i < q.size(); ++i) number(q[i]);
  }

 private:
  std::ostream& sep() {
    if (!first_) out_ << ',';
    first_ = false;
    return out_;
  }
  std::ostream& out_;
  bool first_ = true;
};

class CsvFields {
 public:
  CsvFields(const std::string& line, std::size_t expected, long line_no) : line_no_(line_no) {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells_.push_back(cell);
    if (!line.empty() && line.back() == ',') cells_.emplace_back();
    if (cells_.size() != expected) fail("expected " + std::to_string(expected) + " fields");
  }

  const std::string& text() { return cells_.at(next_++); }
  bool flag() {
    const std::string& s = text();
    if (s != "0" && s != "1") fail("expected 0 or 1");
    return s == "1";
  }
  double number() {
    const std::string& s = text();
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) fail("malformed number \"" + s + "\"");
    return v;
  }
  long integer() { return std::lround(number()); }
  Transform pose(const FrameId& from, const FrameId& to) {
    const double tx = number(), ty = number(), tz = number();
    const double qw = number(), qx = number(), qy = number(), qz = number();
    // Written values are already unit and canonical; keep their bits.
    Rigid r;
    r.rotation = Eigen::Quaterniond(qw, qx, qy, qz);
    r.translation = Eigen::Vector3d(tx, ty, tz);
    if (std::abs(r.rotation.norm() - 1.0) > 1e-9) fail("quaternion is not unit");
    return Transform(from, to, r);
  }
  JointVector joints(std::size_t n) {
    JointVector q(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < q.size(); ++i) q[i] = number();
    return q;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError("", "log line " + std::to_string(line_no_) + ": " + message);
  }
  std::vector<std::string> cells_;
  std::size_t next_ = 0;
  long line_no_;
};

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::vector<std::string> log_columns() {
  std::vector<std::string> cols = {"t",         "tick",        "display",  "attached", "attachment",
                                   "gripper",   "unreachable", "singular", "clamped"};
  for (const auto name : human::kJointNames) cols.push_back("q_" + std::string(name));
  for (const char* prefix : {"eh", "link", "ear", "filt"}) pose_columns(cols, prefix);
  for (const std::string& name : robot_joint_names()) cols.push_back("rq_" + name);
  pose_columns(cols, "er");
  cols.push_back("err_t");
  cols.push_back("err_r");
  return cols;
}

void write_log_csv(std::ostream& out, const SimLog& log) {
  {
    CsvLine header(out);
    for (const std::string& col : log_columns()) header.text(col);
  }
  for (const LogRow& row : log.rows) {
    CsvLine line(out);
    line.number(row.t);
    line.integer(row.tick);
    line.flag(log.display);
    line.flag(row.attached);
    line.text(row.attachment);
    line.flag(row.gripper);
    line.flag(row.flags.unreachable);
    line.flag(row.flags.singular);
    line.flag(row.flags.clamped);
    line.joints(row.body_q);
    line.pose(row.body_pose);
    line.pose(row.linkage);
    line.pose(row.virtual_world);
    line.pose(row.filtered);
    line.joints(row.robot_q);
    line.pose(row.robot_world);
    line.number(row.error.translation);
    line.number(row.error.rotation);
  }
}

SimLog read_log_csv(std::istream& in) {
  const auto cols = log_columns();
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("", "log is empty");
  std::string expected;
  for (std::size_t i = 0; i < cols.size(); ++i) expected += (i ? "," : "") + cols[i];
  if (line != expected) throw ConfigError("", "log header does not match the expected columns");

  const std::size_t robot_dof = robot_joint_names().size();
  SimLog log;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    CsvFields f(line, cols.size(), line_no);
    LogRow row;
    row.t = f.number();
    row.tick = f.integer();
    log.display = f.flag();
    row.attached = f.flag();
    row.attachment = f.text();
    row.gripper = f.flag();
    row.flags.unreachable = f.flag();
    row.flags.singular = f.flag();
    row.flags.clamped = f.flag();
    row.body_q = f.joints(human::kDof);
    row.body_pose = f.pose(frames::kBody, frames::kWorld);
    row.linkage = f.pose(frames::kVirtualEffector, frames::kBody);
    row.virtual_world = f.pose(frames::kVirtualEffector, frames::kWorld);
    row.filtered = f.pose(frames::kVirtualEffector, frames::kWorld);
    row.robot_q = f.joints(robot_dof);
    row.robot_world = f.pose(frames::kRobotEffector, frames::kWorld);
    row.error.translation = f.number();
    row.error.rotation = f.number();
    log.rows.push_back(std::move(row));
  }
  if (log.rows.size() >= 2) log.dt = log.rows[1].t - log.rows[0].t;
  return log;
}

Json log_row_to_json(const LogRow& row, bool display) {
  const auto vec = [](const JointVector& q) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < q.size(); ++i) out.push_back(q[i]);
    return out;
  };
  Json out;
  out["t"] = row.t;
  out["tick"] = row.tick;
  out["display"] = display;
  out["attached"] = row.attached;
  out["attachment"] = row.attachment;
  out["gripper"] = row.gripper;
  out["flags"] = {{"unreachable", row.flags.unreachable},
                  {"singular", row.flags.singular},
                  {"clamped", row.flags.clamped}};
  out["body_q"] = vec(row.body_q);
  out["E_H"] = transform_to_json(row.body_pose);
  out["linkage"] = transform_to_json(row.linkage);
  out["E_AR"] = transform_to_json(row.virtual_world);
  out["E_AR_filtered"] = transform_to_json(row.filtered);
  out["robot_q"] = vec(row.robot_q);
  out["E_R"] = transform_to_json(row.robot_world);
  out["error"] = {{"translation", row.error.translation}, {"rotation", row.error.rotation}};
  return out;
}

void write_log_jsonl(std::ostream& out, const SimLog& log) {
  for (const LogRow& row : log.rows) out << log_row_to_json(row, log.display).dump() << '\n';
}

}  // namespace wornsim
