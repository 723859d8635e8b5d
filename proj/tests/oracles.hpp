#pragma once

// Test-side oracles, independent of the DP engines they check.  Everything
// here works in plain linear arithmetic (compensated where it matters) so
// a log-domain bug in the engines cannot hide.

#include <vector>

#include "pinlab/environment.hpp"
#include "pinlab/renewal_law.hpp"

namespace pinlab::oracle {

// Exhaustive enumeration over all renewal paths / contact subsets up to
// n <= 20.  Uses the same tabulated K and charges as the engines but sums
// path weights directly.
struct EnumerationOracle {
  double Z = 1.0;
  double Z_free = 1.0;
  std::vector<double> G;  // index = jump count N, size n + 1

  double event_weight(int n0_jumps) const;  // sum_{N >= n0} G[N]
};
EnumerationOracle enumerate_paths(const Environment& env,
                                  const RenewalLaw& law,
                                  const ModelParams& params, int n);

// Homogeneous renewal mass function u_n = P(n in tau) by the defining
// recursion u_n = sum_j K(j) u_{n-j}.
std::vector<double> renewal_mass_function(const RenewalLaw& law, int L);

// P(tau_N = n) for n <= L by repeated convolution of the gap law.
std::vector<double> jump_time_pmf(const RenewalLaw& law, int n_jumps, int L);

// P(tau_N <= L) for the Geometric gap law: negative-binomial CDF via
// lgamma-based terms, compensated summation.
double negbin_cdf(double p, int n_jumps, int L);

// First-return probabilities of the simple random walk by exhaustive
// enumeration of all +-1 paths (steps <= 24).
double srw_first_return_enumeration(int steps);

// Localized-phase free energy of the homogeneous (beta = 0) Geometric
// pinning model: the root F of sum_n K(n) e^{-F n} = e^h in closed form.
double geometric_free_energy_root(double p, double h);

// Regularized upper incomplete gamma Q(a, x) and the chi-square p-value.
double gamma_q(double a, double x);
double chi_square_pvalue(double stat, int dof);

// Bracketing bounds for zeta(s) from N-term partial sums and the integral
// tail on either side.
struct ZetaBracket {
  double lo = 0.0, hi = 0.0;
};
ZetaBracket zeta_bracket(double s, int terms = 1000000);

}  // namespace pinlab::oracle
