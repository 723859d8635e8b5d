#pragma once

#include <Eigen/Core>

#include <limits>
#include <span>
#include <vector>

#include "pinlab/environment.hpp"
#include "pinlab/partition_engine.hpp"
#include "pinlab/renewal_law.hpp"

namespace pinlab {

// Ordinary least squares through (x, y); slope_stderr is residual-based.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double max_abs_residual = 0.0;
};
LineFit linear_fit(std::span<const double> x, std::span<const double> y);

// Finite-size free energy (1/n) log Z_n.
double free_energy_estimate(const Eigen::ArrayXd& log_Z, int n);
// The whole monotone-horizon sequence, for extrapolation plots; entry 0 is 0.
Eigen::ArrayXd free_energy_sequence(const Eigen::ArrayXd& log_Z);

// Localization predicate threshold: finite-size (1/n) log Z_n fluctuates
// at scale log(n)/n near the critical point, so the phase call compares
// against 2 log(n)/n rather than zero.
double bisection_threshold(int horizon);

struct BisectTracePoint {
  double h = 0.0;
  double median_f = 0.0;
  bool localized = false;
};

struct HcBisect {
  double hc = 0.0;
  double half_width = 0.0;       // bisection interval radius at stop
  double ensemble_spread = 0.0;  // sd of per-seed f_hat at the estimate
  std::vector<double> f_at_hc;   // per-seed f_hat at the returned estimate
  std::vector<BisectTracePoint> trace;
};

// Bisects h on the predicate "median over seeds of f_hat(h) exceeds the
// threshold".  Brackets are expanded a couple of times before giving up.
HcBisect estimate_hc_bisection(const RenewalLaw& law, ChargeDist dist,
                               double beta, std::span<const uint64_t> seeds,
                               int horizon, double tol,
                               double half_width = 0.0, double h_lo = -0.75,
                               double h_hi = std::numeric_limits<double>::quiet_NaN());

struct HcSlope {
  double hc = 0.0;
  double slope = 0.0;
  double slope_stderr = 0.0;
  double max_trunc_gap = 0.0;  // max relative F_N^{(L)} - F_N^{(L/2)} gap on the window
  int window_lo = 0;
  int window_hi = 0;
};

// Ladder-slope estimator: fits log F_N^{(L)} against N over a window and
// returns h_probe + slope (the probe being the h the tables were built
// at).  Refuses to fit when the truncation diagnostic says the window has
// not converged in L.
HcSlope estimate_hc_slope(const LadderTables& tables, int window_lo = 20,
                          int window_hi = -1, double trunc_tol = 1e-3);

// The annealed reference curve log E[e^{beta omega}].
double annealed_curve(ChargeDist dist, double beta, double half_width = 0.0);

}  // namespace pinlab
