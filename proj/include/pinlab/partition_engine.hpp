#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

#include "pinlab/environment.hpp"
#include "pinlab/logspace.hpp"
#include "pinlab/renewal_law.hpp"

namespace pinlab {

using ArrayXXdRow =
    Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// log Z_n for n = 0..L (log Z_0 = 0), by the contact decomposition
//   Z_n = sum_{j=0}^{n-1} Z_j e^{beta w_j - h} K(n - j).
// Reference O(L^2) engine; this is the correctness definition every other
// engine is measured against.  A zero partition (e.g. odd n under the SRW
// law) comes back as -infinity.
Eigen::ArrayXd compute_constrained(const Environment& env,
                                   const RenewalLaw& law,
                                   const ModelParams& params, int L);

// log Z_{n,f} via Z_{n,f} = sum_{j<n} Z_j e^{beta w_j - h} bar K(n - j).
Eigen::ArrayXd compute_free(const Environment& env, const RenewalLaw& law,
                            const ModelParams& params, int L);
// Same, reusing an already-computed constrained sequence.
Eigen::ArrayXd compute_free_given(const Eigen::ArrayXd& log_Z,
                                  const Environment& env,
                                  const RenewalLaw& law,
                                  const ModelParams& params, int L);

// Full log-domain tables for one (environment, law, params) triple.
// G_{N,n} sums the weights of contact paths 0 = l_0 < ... < l_N = n, so
// summing a column over N recovers Z_n and summing a row over n <= L gives
// the truncated ladder F_N^{(L)}.
struct LadderTables {
  int L = 0;
  int n_max_jumps = 0;
  ModelParams params;
  Eigen::ArrayXd log_Z;        // n = 0..L
  Eigen::ArrayXd log_Z_free;   // n = 0..L
  ArrayXXdRow log_G;           // (N, n), N = 0..n_max_jumps, n = 0..L
  Eigen::ArrayXd log_F_trunc;  // N = 0..n_max_jumps; [0] = -inf
  // F_N^{(L/2)}: the truncation diagnostic F_N^{(L)} - F_N^{(L/2)} says how
  // converged each row is in the horizon.
  Eigen::ArrayXd log_F_trunc_half;
  // provenance
  std::string law_spec;
  uint64_t law_checksum = 0;
  uint64_t env_checksum = 0;
  std::string engine;
};

LadderTables compute_ladder(const Environment& env, const RenewalLaw& law,
                            const ModelParams& params, int n_max_jumps, int L);

// log sum_N G_{N,n}; matches log_Z[n] up to the column-identity tolerance.
double ladder_column_sum(const LadderTables& tables, int n);

// log Z_n(E_{n,N0}) = log sum_{N >= N0} G_{N,n}.  Exact whenever the table
// depth covers every possible jump count (n_max_jumps >= n); otherwise the
// value is a lower bound and a certified remainder bound is attached.
struct EventWeight {
  double log_value = kLogZero;
  bool exact = true;
  double log_tail_bound = kLogZero;  // +inf when the remainder is uncertifiable
};
EventWeight event_restricted(const LadderTables& tables, int n, int n0_jumps);

// Exact law of the jump count at endpoint n: P(N jumps) = G_{N,n} / Z_n,
// N = 0..n_max_jumps.  Requires n_max_jumps >= n so nothing is truncated.
Eigen::ArrayXd contact_distribution(const LadderTables& tables, int n);

// Streaming ladder walk used by the sum-interchange and partial-sum
// audits: row sums F_N^{(L_k)} at a set of checkpoint horizons, per-column
// sums, and prefix sums of Z -- without materializing the G table.  Levels
// stop early once the remaining ladder mass is certifiably below
// rel_tail_tol of the running total (geometric-ratio bound), or run to
// N = L when `adaptive` is off, which makes the interchange identity exact
// by construction.
struct LadderAudit {
  std::vector<int> checkpoints;
  Eigen::ArrayXd log_sum_Z;           // per checkpoint: log sum_{1<=n<=L_k} Z_n
  Eigen::ArrayXd log_sum_F;           // per checkpoint: log sum_N F_N^{(L_k)}
  std::vector<Eigen::ArrayXd> log_F;  // per checkpoint: [N] = log F_N^{(L_k)}
  Eigen::ArrayXd log_colsum;          // per n: log sum_N G_{N,n}
  int levels = 0;                     // deepest N computed
  bool exhausted = false;             // levels == L
  bool converged = false;
  bool diverging = false;             // row sums growing: localized parameters
  double log_tail_bound = kLogZero;   // bound on log sum_{N > levels} F_N^{(L)}
};
LadderAudit ladder_interchange_audit(const Environment& env,
                                     const RenewalLaw& law,
                                     const ModelParams& params,
                                     std::vector<int> checkpoints,
                                     bool adaptive = true,
                                     double rel_tail_tol = 1e-16,
                                     int max_levels = -1);

// Columnar text export: provenance header, then one record per value
// (Z / ZF / F / G), log domain, full double precision.
void export_tables(const LadderTables& tables,
                   const std::filesystem::path& path);

}  // namespace pinlab
