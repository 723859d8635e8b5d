#include "pinlab/phase_analysis.hpp"

#include <algorithm>
#include <cmath>

#include "pinlab/errors.hpp"
#include "pinlab/logspace.hpp"
#include "pinlab/parallel.hpp"

namespace pinlab {

LineFit linear_fit(std::span<const double> x, std::span<const double> y) {
  const size_t k = x.size();
  if (k != y.size() || k < 2) throw ConfigError("linear_fit needs >= 2 points");
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < k; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < k; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw ConfigError("linear_fit: degenerate abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (size_t i = 0; i < k; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
    fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(r));
  }
  fit.slope_stderr =
      k > 2 ? std::sqrt(ss / static_cast<double>(k - 2) / sxx) : 0.0;
  return fit;
}

double free_energy_estimate(const Eigen::ArrayXd& log_Z, int n) {
  if (n < 1 || n >= log_Z.size())
    throw ConfigError("free_energy_estimate: n outside the table");
  if (is_log_zero(log_Z[n]))
    throw ConfigError("free_energy_estimate: zero partition at the horizon");
  return log_Z[n] / static_cast<double>(n);
}

Eigen::ArrayXd free_energy_sequence(const Eigen::ArrayXd& log_Z) {
  Eigen::ArrayXd f(log_Z.size());
  f[0] = 0.0;
  for (Eigen::Index n = 1; n < log_Z.size(); ++n)
    f[n] = log_Z[n] / static_cast<double>(n);
  return f;
}

double bisection_threshold(int horizon) {
  return 2.0 * std::log(static_cast<double>(horizon)) / horizon;
}

HcBisect estimate_hc_bisection(const RenewalLaw& law, ChargeDist dist,
                               double beta, std::span<const uint64_t> seeds,
                               int horizon, double tol, double half_width,
                               double h_lo, double h_hi) {
  if (!(tol > 0.0)) throw ConfigError("bisection tolerance must be positive");
  if (seeds.empty()) throw ConfigError("bisection needs at least one seed");
  if (horizon < 16) throw ConfigError("bisection horizon too small");
  if (horizon > law.n_table())
    throw ConfigError("bisection horizon exceeds the law table");
  if (law.even_support() && horizon % 2 != 0)
    throw ConfigError("SRW law needs an even horizon");
  if (std::isnan(h_hi)) h_hi = log_mgf(dist, beta, half_width) + 0.75;

  const int ns = static_cast<int>(seeds.size());
  std::vector<Environment> envs(ns);
  parallel_for(ns, [&](int i) {
    envs[i] = generate_environment(dist, seeds[i], horizon, half_width);
  });

  const double theta = bisection_threshold(horizon);
  HcBisect out;

  auto ensemble_f = [&](double h) {
    std::vector<double> f(ns);
    parallel_for(ns, [&](int i) {
      const Eigen::ArrayXd log_Z =
          compute_constrained(envs[i], law, ModelParams{beta, h}, horizon);
      f[i] = log_Z[horizon] / horizon;
    });
    return f;
  };
  auto median_f = [&](double h) {
    std::vector<double> f = ensemble_f(h);
    std::sort(f.begin(), f.end());
    return ns % 2 == 1 ? f[ns / 2] : 0.5 * (f[ns / 2 - 1] + f[ns / 2]);
  };
  auto localized = [&](double h) {
    const double m = median_f(h);
    out.trace.push_back({h, m, m > theta});
    return m > theta;
  };

  // The predicate must flip inside the bracket: localized at the bottom,
  // delocalized at the top.
  int expansions = 0;
  while (!localized(h_lo)) {
    h_lo -= 1.0;
    if (++expansions > 3)
      throw ConfigError("bisection bracket failure: no localized phase found "
                        "down to h = " + std::to_string(h_lo));
  }
  expansions = 0;
  while (localized(h_hi)) {
    h_hi += 1.0;
    if (++expansions > 3)
      throw ConfigError("bisection bracket failure: still localized up to "
                        "h = " + std::to_string(h_hi));
  }

  while ((h_hi - h_lo) / 2.0 > tol) {
    const double mid = 0.5 * (h_lo + h_hi);
    if (localized(mid))
      h_lo = mid;
    else
      h_hi = mid;
  }

  out.hc = 0.5 * (h_lo + h_hi);
  out.half_width = 0.5 * (h_hi - h_lo);
  out.f_at_hc = ensemble_f(out.hc);
  double m = 0.0;
  for (double v : out.f_at_hc) m += v;
  m /= ns;
  double s2 = 0.0;
  for (double v : out.f_at_hc) s2 += (v - m) * (v - m);
  out.ensemble_spread = ns > 1 ? std::sqrt(s2 / (ns - 1)) : 0.0;
  return out;
}

HcSlope estimate_hc_slope(const LadderTables& tables, int window_lo,
                          int window_hi, double trunc_tol) {
  const int depth = tables.n_max_jumps;
  if (window_hi < 0) window_hi = std::min(60, depth / 2);
  if (window_lo < 1 || window_hi <= window_lo || window_hi > depth)
    throw ConfigError("slope estimator: bad fit window");

  std::vector<double> xs, ys;
  double max_gap = 0.0;
  for (int n_jumps = window_lo; n_jumps <= window_hi; ++n_jumps) {
    const double lf = tables.log_F_trunc[n_jumps];
    if (is_log_zero(lf)) continue;
    const double lh = tables.log_F_trunc_half[n_jumps];
    const double gap = is_log_zero(lh) ? 1.0 : -std::expm1(lh - lf);
    max_gap = std::max(max_gap, gap);
    xs.push_back(static_cast<double>(n_jumps));
    ys.push_back(lf);
  }
  if (xs.size() < 3)
    throw TruncationError("slope estimator: too few finite ladder rows in "
                          "the window");
  if (max_gap > trunc_tol)
    throw TruncationError(
        "slope estimator: truncation gap " + std::to_string(max_gap) +
        " above threshold; the window has not converged in L");

  const LineFit fit = linear_fit(xs, ys);
  HcSlope out;
  out.slope = fit.slope;
  out.slope_stderr = fit.slope_stderr;
  out.hc = tables.params.h + fit.slope;
  out.max_trunc_gap = max_gap;
  out.window_lo = window_lo;
  out.window_hi = window_hi;
  return out;
}

double annealed_curve(ChargeDist dist, double beta, double half_width) {
  return log_mgf(dist, beta, half_width);
}

}  // namespace pinlab
