#include "wornsim/metrics.hpp"

#include <cmath>

#include "wornsim/errors.hpp"

namespace wornsim {

namespace {

std::vector<Eigen::Vector3d> velocities(const SimLog& log, Transform LogRow::*pose) {
  std::vector<Eigen::Vector3d> v;
  for (std::size_t k = 1; k < log.rows.size(); ++k) {
    v.push_back(((log.rows[k].*pose).translation() - (log.rows[k - 1].*pose).translation()) / log.dt);
  }
  return v;
}

// World position of E_AR for a linkage and a body pose.
Eigen::Vector3d effector_position(const Transform& linkage, const Transform& body) {
  return body.motion().apply(linkage.translation());
}

}  // namespace

double estimate_latency(const SimLog& log, double max_lag) {
  if (log.rows.size() < 3) return 0.0;
  const auto lead = velocities(log, &LogRow::virtual_world);
  const auto follow = velocities(log, &LogRow::robot_world);
  const long n = static_cast<long>(lead.size());
  const long lags = std::min(static_cast<long>(std::floor(max_lag / log.dt + 1e-9)), n - 1);
  long best_lag = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (long lag = 0; lag <= lags; ++lag) {
    double cross = 0.0, a = 0.0, b = 0.0;
    for (long k = 0; k + lag < n; ++k) {
      cross += lead[k].dot(follow[k + lag]);
      a += lead[k].squaredNorm();
      b += follow[k + lag].squaredNorm();
    }
    if (a == 0.0 || b == 0.0) continue;
    const double score = cross / std::sqrt(a * b);
    if (score > best) {
      best = score;
      best_lag = lag;
    }
  }
  return static_cast<double>(best_lag) * log.dt;
}

double compensation_share(const SimLog& log) {
  double body = 0.0;
  double linkage = 0.0;
  for (std::size_t k = 1; k < log.rows.size(); ++k) {
    const LogRow& prev = log.rows[k - 1];
    const LogRow& cur = log.rows[k];
    if (!prev.attached || !cur.attached || prev.attachment != cur.attachment) continue;
    const Eigen::Vector3d base = effector_position(prev.linkage, prev.body_pose);
    body += (effector_position(prev.linkage, cur.body_pose) - base).norm();
    linkage += (effector_position(cur.linkage, prev.body_pose) - base).norm();
  }
  const double total = body + linkage;
  return total > 0.0 ? body / total : 0.0;
}

Metrics compute_metrics(const SimLog& log, double max_lag) {
  if (log.rows.empty()) throw EmptyLog("metrics need at least one log row");
  Metrics m;
  double sum_t = 0.0, sum_r = 0.0;
  for (const LogRow& row : log.rows) {
    if (!row.attached) continue;
    ++m.attached_ticks;
    sum_t += row.error.translation * row.error.translation;
    sum_r += row.error.rotation * row.error.rotation;
  }
  if (m.attached_ticks > 0) {
    m.rms_tracking_error.translation = std::sqrt(sum_t / static_cast<double>(m.attached_ticks));
    m.rms_tracking_error.rotation = std::sqrt(sum_r / static_cast<double>(m.attached_ticks));
  }
  m.estimated_latency = estimate_latency(log, max_lag);
  m.compensation_share = compensation_share(log);
  return m;
}

Json metrics_to_json(const Metrics& m) {
  Json out;
  out["rms_tracking_error"] = {{"translation", m.rms_tracking_error.translation},
                               {"rotation", m.rms_tracking_error.rotation}};
  out["attached_ticks"] = m.attached_ticks;
  out["estimated_latency"] = m.estimated_latency;
  out["compensation_share"] = m.compensation_share;
  return out;
}

}  // namespace wornsim
