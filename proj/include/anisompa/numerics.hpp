#pragma once

#include <span>
#include <vector>

namespace anisompa {

// count points, log-uniform on [lo, hi], endpoints included. lo, hi > 0.
std::vector<double> log_grid(double lo, double hi, int count);

// Least-squares slope of log(v) against log(t). All entries must be > 0.
double fit_loglog_slope(std::span<const double> ts, std::span<const double> vs);

// Slope fitted over the lowest (lower = true) or highest decade of the table,
// using at most max_points entries from that end.
double fit_end_slope(std::span<const double> ts, std::span<const double> vs,
                     bool lower, int max_points = 10);

// Round to a multiple of step, outward (down/up), snapping values already
// within snap_rel of a multiple so exact inputs stay exact.
double round_down_step(double x, double step, double snap_rel = 1e-9);
double round_up_step(double x, double step, double snap_rel = 1e-9);

inline double sign_of(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

} // namespace anisompa
