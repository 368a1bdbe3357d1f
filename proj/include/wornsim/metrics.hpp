#pragma once

#include "wornsim/json_io.hpp"
#include "wornsim/simulation.hpp"

namespace wornsim {

struct Metrics {
  PoseError rms_tracking_error;  // over attached ticks
  long attached_ticks = 0;
  double estimated_latency = 0.0;   // s
  double compensation_share = 0.0;  // [0, 1]
};

/// Lag (multiple of dt, in [0, max_lag]) maximizing the normalized
/// cross-correlation of the E_AR and E_R translation velocities. Ties go to
/// the smallest lag; a motionless log gives 0.
double estimate_latency(const SimLog& log, double max_lag = 1.0);

/// Share of the E_AR world displacement due to body motion. Each tick pair
/// attached to the same frame contributes the displacement from moving the
/// body with the linkage frozen, and from moving the linkage with the body
/// frozen. 0 when nothing moved.
double compensation_share(const SimLog& log);

/// Throws EmptyLog.
Metrics compute_metrics(const SimLog& log, double max_lag = 1.0);

Json metrics_to_json(const Metrics& metrics);

}  // namespace wornsim
