#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wornsim/json_io.hpp"
#include "wornsim/simulation.hpp"

namespace wornsim {

/// CSV column order. Poses take seven columns each, <prefix>_tx, _ty, _tz,
/// _qw, _qx, _qy, _qz, with prefixes eh (E_H -> W), link (E_AR -> E_H),
/// ear (E_AR -> W), filt (filtered E_AR -> W) and er (E_R -> W):
///
///   t, tick, display, attached, attachment, gripper, unreachable, singular,
///   clamped, q_<human joint> x9, eh_*, link_*, ear_*, filt_*,
///   rq_<robot joint> x6, er_*, err_t, err_r
///
/// Booleans are 0/1; numbers use the shortest round-trip form.
std::vector<std::string> log_columns();

void write_log_csv(std::ostream& out, const SimLog& log);
/// Inverse of write_log_csv; dt is recovered from the first two rows.
/// Throws ConfigError on malformed input.
SimLog read_log_csv(std::istream& in);

/// One JSON object per row, poses in the {from, to, q, t} form.
Json log_row_to_json(const LogRow& row, bool display);
void write_log_jsonl(std::ostream& out, const SimLog& log);

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

}  // namespace wornsim
