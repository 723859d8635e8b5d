#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>

#include "pinlab/rng.hpp"

namespace pinlab {

enum class LawFamily { PowerLaw, SimpleRandomWalkReturn, Geometric };

std::string family_name(LawFamily f);

// Inter-arrival law K(n) on {1, 2, ...}.  Tables are built once and never
// mutated; concurrent reads are safe.
//
// Construction goes tail-first: tail_table[m] = bar K(m) is computed from
// the family's analytic form, and mass_table[m] is then *defined* as the
// floating-point difference tail_table[m] - tail_table[m+1].  IEEE
// subtraction is correctly rounded, so K(m) carries a relative error of at
// most one ulp against the stored tails and the two tables stay mutually
// consistent to the last bit.
struct RenewalLaw {
  LawFamily family = LawFamily::PowerLaw;
  // Regular-variation exponent: K(n) decays like n^{-(1+alpha)}.
  // alpha = 1/2 for the simple-random-walk return law; infinity for the
  // Geometric family, which deliberately violates the power-tail
  // assumption and is meant for closed-form oracle runs only.
  double alpha = 0.0;
  double param = 0.0;  // PowerLaw: alpha; Geometric: p; SRW: unused
  Eigen::ArrayXd mass_table;      // [0..n_table], index 0 unused (= 0)
  Eigen::ArrayXd tail_table;      // [0..n_table+1], tail_table[1] = 1
  Eigen::ArrayXd log_mass_table;  // log of mass_table, -inf at zeros
  Eigen::ArrayXd log_tail_table;
  uint64_t checksum = 0;  // FNV-1a over family, param, n_table, mass bytes

  int n_table() const { return static_cast<int>(mass_table.size()) - 1; }
  bool regvar() const { return family != LawFamily::Geometric; }
  bool even_support() const {
    return family == LawFamily::SimpleRandomWalkReturn;
  }
  std::string spec_string() const;
};

// PowerLaw: K(n) = n^{-(1+alpha)} / zeta(1+alpha), param = alpha > 0.
// SimpleRandomWalkReturn: K(2m) = C(2m,m) 2^{-2m} / (2m-1), K(odd) = 0.
// Geometric: K(n) = p (1-p)^{n-1}, param = p in (0,1).
RenewalLaw build_law(LawFamily family, double param, int n_table);

// "powerlaw:alpha=0.5" / "powerlaw:0.5" / "srw" / "geometric:p=0.3".
RenewalLaw parse_law_spec(const std::string& spec, int n_table);

double mass(const RenewalLaw& law, int n);        // K(n), 1 <= n <= n_table
double tail(const RenewalLaw& law, int m);        // bar K(m), m <= n_table+1
double log_mass(const RenewalLaw& law, int n);
double log_tail(const RenewalLaw& law, int m);

// Inverse-CDF draw on the tabulated masses; beyond the table the family's
// analytic tail takes over (asymptotic inversion for the power families,
// exact for Geometric), so the draw always terminates.
int64_t sample_gap(const RenewalLaw& law, Xoshiro256pp& rng);

// Structured-text record: family, parameters, n_table, mass checksum.
// Loading rebuilds the tables and audits the checksum.
void save_law_record(const RenewalLaw& law, const std::filesystem::path& path);
RenewalLaw load_law_record(const std::filesystem::path& path);

// Riemann zeta(s) for s > 1 by partial sums plus an Euler-Maclaurin
// remainder; absolute accuracy around 1e-15 relative.  Exposed for tests.
double zeta_partial(double s);

}  // namespace pinlab
