#include "pinlab/gibbs_sampler.hpp"

#include <algorithm>
#include <cmath>

#include "pinlab/errors.hpp"
#include "pinlab/logspace.hpp"

namespace pinlab {

ContactPath sample_path(const Eigen::ArrayXd& log_Z, const Environment& env,
                        const RenewalLaw& law, const ModelParams& params,
                        int n, Xoshiro256pp& rng) {
  validate(params);
  if (n < 0 || n >= log_Z.size() || n > env.length() || n > law.n_table())
    throw ConfigError("sample_path: endpoint outside the tables");
  if (is_log_zero(log_Z[n]))
    throw ConfigError("sample_path: impossible endpoint (Z_n = 0)");

  std::vector<int> rev{n};
  std::vector<double> t, wt;
  int cur = n;
  while (cur > 0) {
    t.resize(cur);
    wt.resize(cur);
    double m = kLogZero;
    for (int j = 0; j < cur; ++j) {
      t[j] = log_Z[j] + params.beta * env.charges[j] - params.h +
             law.log_mass_table[cur - j];
      m = std::max(m, t[j]);
    }
    double total = 0.0, comp = 0.0;
    for (int j = 0; j < cur; ++j) {
      wt[j] = t[j] >= m + kNegligibleLog ? std::exp(t[j] - m) : 0.0;
      detail::kahan_add(total, comp, wt[j]);
    }
    const double u = rng.next_unit() * (total + comp);
    double cum = 0.0;
    int pick = -1;
    for (int j = 0; j < cur; ++j) {
      cum += wt[j];
      if (u < cum) {
        pick = j;
        break;
      }
    }
    if (pick < 0) {  // fp edge: settle on the last possible predecessor
      for (int j = cur - 1; j >= 0; --j)
        if (wt[j] > 0.0) {
          pick = j;
          break;
        }
    }
    rev.push_back(pick);
    cur = pick;
  }
  ContactPath path;
  path.points.assign(rev.rbegin(), rev.rend());
  return path;
}

ContactSummary contact_statistics(std::span<const ContactPath> paths) {
  if (paths.empty()) throw ConfigError("contact_statistics: empty collection");
  ContactSummary s;
  s.n = paths.front().points.back();
  s.count = static_cast<long>(paths.size());
  int max_gap = 0;
  double sum = 0.0, sum2 = 0.0;
  for (const auto& p : paths) {
    if (p.points.empty() || p.points.front() != 0 || p.points.back() != s.n)
      throw ConfigError("contact_statistics: mixed endpoints in collection");
    const int jumps = p.jump_count();
    s.max_jumps = std::max(s.max_jumps, jumps);
    sum += jumps;
    sum2 += static_cast<double>(jumps) * jumps;
    for (size_t i = 1; i < p.points.size(); ++i)
      max_gap = std::max(max_gap, p.points[i] - p.points[i - 1]);
  }
  const double cnt = static_cast<double>(s.count);
  s.mean_jumps = sum / cnt;
  s.var_jumps = std::max(0.0, sum2 / cnt - s.mean_jumps * s.mean_jumps);

  s.event_tail_freq = Eigen::ArrayXd::Zero(s.max_jumps + 2);
  s.gap_histogram.assign(static_cast<size_t>(max_gap) + 1, 0);
  for (const auto& p : paths) {
    const int jumps = p.jump_count();
    for (int b = 0; b <= jumps; ++b) s.event_tail_freq[b] += 1.0;
    for (size_t i = 1; i < p.points.size(); ++i)
      ++s.gap_histogram[static_cast<size_t>(p.points[i] - p.points[i - 1])];
  }
  s.event_tail_freq /= cnt;
  return s;
}

}  // namespace pinlab
