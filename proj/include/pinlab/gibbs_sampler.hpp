#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

#include "pinlab/environment.hpp"
#include "pinlab/renewal_law.hpp"
#include "pinlab/rng.hpp"

namespace pinlab {

// A contact configuration under the polymer measure: the set tau ∩ [0, n]
// listed in increasing order, points.front() = 0, points.back() = n.
struct ContactPath {
  std::vector<int> points;
  int jump_count() const { return static_cast<int>(points.size()) - 1; }
};

// Exact backward sampling from the completed DP tables: starting at the
// forced contact n, the previous contact j is drawn with probability
// Z_j e^{beta w_j - h} K(n - j) / Z_n, which the constrained recursion
// makes an exact categorical.  Linear time per step, no MCMC.
ContactPath sample_path(const Eigen::ArrayXd& log_Z, const Environment& env,
                        const RenewalLaw& law, const ModelParams& params,
                        int n, Xoshiro256pp& rng);

struct ContactSummary {
  int n = 0;
  long count = 0;
  double mean_jumps = 0.0;
  double var_jumps = 0.0;
  int max_jumps = 0;
  // event_tail_freq[N] = empirical P(E_{n,N}) = fraction of paths with at
  // least N jumps; index 0..max_jumps+1.
  Eigen::ArrayXd event_tail_freq;
  std::vector<long> gap_histogram;  // index = gap length, [0] unused
};

ContactSummary contact_statistics(std::span<const ContactPath> paths);

}  // namespace pinlab
