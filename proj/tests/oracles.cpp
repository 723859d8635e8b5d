#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

#include "pinlab/logspace.hpp"

namespace pinlab::oracle {

double EnumerationOracle::event_weight(int n0_jumps) const {
  double sum = 0.0, comp = 0.0;
  for (size_t n_jumps = std::max(n0_jumps, 0); n_jumps < G.size(); ++n_jumps)
    detail::kahan_add(sum, comp, G[n_jumps]);
  return sum;
}

EnumerationOracle enumerate_paths(const Environment& env,
                                  const RenewalLaw& law,
                                  const ModelParams& params, int n) {
  if (n < 0 || n > 20)
    throw std::invalid_argument("enumeration oracle limited to n <= 20");
  if (n > env.length() || n > law.n_table())
    throw std::invalid_argument("enumeration oracle: n beyond tables");

  EnumerationOracle out;
  out.G.assign(static_cast<size_t>(n) + 1, 0.0);
  if (n == 0) {
    out.G[0] = 1.0;
    return out;
  }

  std::vector<double> site(n);  // e^{beta w_k - h}, k = 0..n-1
  for (int k = 0; k < n; ++k)
    site[k] = std::exp(params.beta * env.charges[k] - params.h);

  std::vector<double> g_comp(static_cast<size_t>(n) + 1, 0.0);
  double zf = 0.0, zf_comp = 0.0;
  std::vector<int> contacts;
  const uint64_t subsets = 1ull << (n - 1);
  for (uint64_t mask = 0; mask < subsets; ++mask) {
    contacts.clear();
    contacts.push_back(0);
    for (int k = 1; k < n; ++k)
      if (mask & (1ull << (k - 1))) contacts.push_back(k);

    // Charge factor over all contacts in [0, n-1] and the gap product
    // inside the contact set; shared by both partition functions.
    double charge = 1.0, gaps = 1.0;
    for (size_t i = 0; i < contacts.size(); ++i) {
      charge *= site[contacts[i]];
      if (i > 0) gaps *= law.mass_table[contacts[i] - contacts[i - 1]];
    }
    const int last = contacts.back();

    // Constrained: one more jump lands exactly on n.
    const double wz = charge * gaps * law.mass_table[n - last];
    detail::kahan_add(out.G[contacts.size()], g_comp[contacts.size()], wz);

    // Free: the next renewal overshoots n - 1.
    detail::kahan_add(zf, zf_comp, charge * gaps * law.tail_table[n - last]);
  }

  double z = 0.0, z_comp = 0.0;
  for (size_t n_jumps = 0; n_jumps <= static_cast<size_t>(n); ++n_jumps)
    detail::kahan_add(z, z_comp, out.G[n_jumps]);
  out.Z = z;
  out.Z_free = zf;
  return out;
}

std::vector<double> renewal_mass_function(const RenewalLaw& law, int L) {
  std::vector<double> u(static_cast<size_t>(L) + 1, 0.0);
  u[0] = 1.0;
  for (int n = 1; n <= L; ++n) {
    double sum = 0.0, comp = 0.0;
    for (int j = 1; j <= std::min(n, law.n_table()); ++j)
      detail::kahan_add(sum, comp, law.mass_table[j] * u[n - j]);
    u[n] = sum;
  }
  return u;
}

std::vector<double> jump_time_pmf(const RenewalLaw& law, int n_jumps, int L) {
  std::vector<double> pmf(static_cast<size_t>(L) + 1, 0.0);
  pmf[0] = 1.0;  // tau_0 = 0
  for (int step = 0; step < n_jumps; ++step) {
    std::vector<double> next(static_cast<size_t>(L) + 1, 0.0);
    for (int m = 0; m <= L; ++m) {
      if (pmf[m] == 0.0) continue;
      for (int g = 1; g <= std::min(L - m, law.n_table()); ++g)
        next[m + g] += pmf[m] * law.mass_table[g];
    }
    pmf.swap(next);
  }
  return pmf;
}

double negbin_cdf(double p, int n_jumps, int L) {
  if (n_jumps < 1) throw std::invalid_argument("negbin_cdf: N >= 1");
  if (L < n_jumps) return 0.0;
  const double lp = std::log(p), lq = std::log1p(-p);
  const double lgn = std::lgamma(static_cast<double>(n_jumps));
  double sum = 0.0, comp = 0.0;
  for (int k = n_jumps; k <= L; ++k) {
    const double lpmf = std::lgamma(static_cast<double>(k)) - lgn -
                        std::lgamma(static_cast<double>(k - n_jumps + 1)) +
                        n_jumps * lp + (k - n_jumps) * lq;
    detail::kahan_add(sum, comp, std::exp(lpmf));
  }
  return sum;
}

double srw_first_return_enumeration(int steps) {
  if (steps < 1 || steps > 24)
    throw std::invalid_argument("srw enumeration limited to 24 steps");
  uint64_t hits = 0;
  const uint64_t total = 1ull << steps;
  for (uint64_t walk = 0; walk < total; ++walk) {
    int pos = 0;
    bool first_return_here = true;
    for (int i = 0; i < steps; ++i) {
      pos += (walk >> i) & 1 ? 1 : -1;
      if (pos == 0 && i + 1 < steps) {
        first_return_here = false;
        break;
      }
    }
    if (first_return_here && pos == 0) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

double geometric_free_energy_root(double p, double h) {
  // sum_n p q^{n-1} e^{-F n} = e^h  solves to  F = log(q + p e^{-h}).
  return std::log((1.0 - p) + p * std::exp(-h));
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q domain");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) {
    // series for P(a, x)
    double ap = a, del = 1.0 / a, sum = del;
    for (int i = 0; i < 1000; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  // continued fraction for Q(a, x)
  double b = x + 1.0 - a;
  double c = 1e308, d = 1.0 / b, f = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    f *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * f;
}

double chi_square_pvalue(double stat, int dof) {
  return gamma_q(dof / 2.0, stat / 2.0);
}

ZetaBracket zeta_bracket(double s, int terms) {
  double sum = 0.0, comp = 0.0;
  for (int n_term = terms; n_term >= 1; --n_term)
    detail::kahan_add(sum, comp, std::pow(static_cast<double>(n_term), -s));
  const double partial = sum + comp;
  ZetaBracket zb;
  // integral bounds: int_{N+1}^inf < tail < int_N^inf
  zb.lo = partial + std::pow(terms + 1.0, 1.0 - s) / (s - 1.0);
  zb.hi = partial + std::pow(static_cast<double>(terms), 1.0 - s) / (s - 1.0);
  return zb;
}

}  // namespace pinlab::oracle
