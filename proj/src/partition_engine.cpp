#include "pinlab/partition_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "pinlab/errors.hpp"
#include "pinlab/version.hpp"

namespace pinlab {

namespace {

void check_horizon(const Environment& env, const RenewalLaw& law, int L) {
  if (L < 0) throw ConfigError("horizon must be nonnegative");
  if (L > env.length())
    throw ConfigError("horizon exceeds environment length (" +
                      std::to_string(L) + " > " +
                      std::to_string(env.length()) + ")");
  if (L > law.n_table())
    throw ConfigError("horizon exceeds law table (" + std::to_string(L) +
                      " > " + std::to_string(law.n_table()) + ")");
}

// rk[i] = kernel_log[cap - i], so the addends src[j] + kernel_log[n - j]
// for j in [jlo, n) sit contiguously at rk[cap - n + jlo ...].
Eigen::ArrayXd reversed_kernel(const Eigen::ArrayXd& kernel_log, int cap) {
  Eigen::ArrayXd rk(cap + 1);
  for (int i = 0; i <= cap; ++i) rk[i] = kernel_log[cap - i];
  return rk;
}

// log sum_{j in [jlo, n)} exp(src[j] + rk[cap - n + j]): one vectorized
// add + exp pass, compensated summation of the rescaled terms.  Arguments
// are floored at kNegligibleLog below the max: those terms are below
// 1e-22 of the leading one, and flooring keeps every summation
// intermediate far from pipeline-stalling subnormals.
double convolve_at(const Eigen::ArrayXd& src, const Eigen::ArrayXd& rk,
                   int cap, int jlo, int n, Eigen::ArrayXd& buf,
                   Eigen::ArrayXd& ebuf) {
  const int count = n - jlo;
  if (count <= 0) return kLogZero;
  buf.head(count) = src.segment(jlo, count) + rk.segment(cap - n + jlo, count);
  const double m = buf.head(count).maxCoeff();
  if (is_log_zero(m)) return kLogZero;
  ebuf.head(count) = (buf.head(count) - m).max(kNegligibleLog).exp();
  double sum = 0.0, comp = 0.0;
  const double* p = ebuf.data();
  for (int i = 0; i < count; ++i) detail::kahan_add(sum, comp, p[i]);
  return m + std::log(sum + comp);
}

// Walks ladder levels N = 1, 2, ... without storing the table.  row_fn is
// called with (N, row) where row[n] = log G_{N,n}; returning false stops
// the walk.
template <typename RowFn>
void walk_ladder_levels(const Environment& env, const RenewalLaw& law,
                        const ModelParams& params, int L, int max_levels,
                        RowFn&& row_fn) {
  const Eigen::ArrayXd w = params.beta * env.charges.head(L) - params.h;
  const Eigen::ArrayXd rk = reversed_kernel(law.log_mass_table.head(L + 1), L);
  Eigen::ArrayXd prev = Eigen::ArrayXd::Constant(L + 1, kLogZero);
  prev[0] = 0.0;  // G_{0,0} = 1, empty product
  Eigen::ArrayXd cur(L + 1), srcrow(L + 1), buf(L + 1), ebuf(L + 1);
  for (int level = 1; level <= max_levels; ++level) {
    const int jlo = level - 1;  // G_{N-1,j} = 0 below j = N-1
    cur.setConstant(kLogZero);
    if (jlo < L)
      srcrow.segment(jlo, L - jlo) =
          prev.segment(jlo, L - jlo) + w.segment(jlo, L - jlo);
    for (int n = level; n <= L; ++n)
      cur[n] = convolve_at(srcrow, rk, L, jlo, n, buf, ebuf);
    if (!row_fn(level, cur)) return;
    std::swap(prev, cur);
  }
}

}  // namespace

Eigen::ArrayXd compute_constrained(const Environment& env,
                                   const RenewalLaw& law,
                                   const ModelParams& params, int L) {
  validate(params);
  check_horizon(env, law, L);
  Eigen::ArrayXd log_Z(L + 1);
  log_Z[0] = 0.0;
  if (L == 0) return log_Z;
  const Eigen::ArrayXd w = params.beta * env.charges.head(L) - params.h;
  const Eigen::ArrayXd rk = reversed_kernel(law.log_mass_table.head(L + 1), L);
  Eigen::ArrayXd src(L), buf(L + 1), ebuf(L + 1);
  src[0] = w[0];  // log Z_0 + beta w_0 - h
  for (int n = 1; n <= L; ++n) {
    log_Z[n] = convolve_at(src, rk, L, 0, n, buf, ebuf);
    if (n < L) src[n] = log_Z[n] + w[n];
  }
  return log_Z;
}

Eigen::ArrayXd compute_free_given(const Eigen::ArrayXd& log_Z,
                                  const Environment& env,
                                  const RenewalLaw& law,
                                  const ModelParams& params, int L) {
  validate(params);
  check_horizon(env, law, L);
  if (log_Z.size() < L + 1)
    throw ConfigError("constrained sequence shorter than requested horizon");
  Eigen::ArrayXd log_Zf(L + 1);
  log_Zf[0] = 0.0;
  if (L == 0) return log_Zf;
  const Eigen::ArrayXd w = params.beta * env.charges.head(L) - params.h;
  const Eigen::ArrayXd rt = reversed_kernel(law.log_tail_table.head(L + 1), L);
  Eigen::ArrayXd src(L), buf(L + 1), ebuf(L + 1);
  for (int j = 0; j < L; ++j) src[j] = log_Z[j] + w[j];
  for (int n = 1; n <= L; ++n)
    log_Zf[n] = convolve_at(src, rt, L, 0, n, buf, ebuf);
  return log_Zf;
}

Eigen::ArrayXd compute_free(const Environment& env, const RenewalLaw& law,
                            const ModelParams& params, int L) {
  return compute_free_given(compute_constrained(env, law, params, L), env, law,
                            params, L);
}

LadderTables compute_ladder(const Environment& env, const RenewalLaw& law,
                            const ModelParams& params, int n_max_jumps,
                            int L) {
  validate(params);
  check_horizon(env, law, L);
  if (n_max_jumps < 1 || n_max_jumps > L)
    throw ConfigError("ladder depth must satisfy 1 <= N_max <= L");
  const size_t cells =
      static_cast<size_t>(n_max_jumps + 1) * static_cast<size_t>(L + 1);
  if (cells > (1u << 28))
    throw ConfigError("ladder table too large to store; use the streaming "
                      "audit instead");

  LadderTables t;
  t.L = L;
  t.n_max_jumps = n_max_jumps;
  t.params = params;
  t.log_Z = compute_constrained(env, law, params, L);
  t.log_Z_free = compute_free_given(t.log_Z, env, law, params, L);
  t.log_G = ArrayXXdRow::Constant(n_max_jumps + 1, L + 1, kLogZero);
  t.log_G(0, 0) = 0.0;
  t.log_F_trunc = Eigen::ArrayXd::Constant(n_max_jumps + 1, kLogZero);
  t.log_F_trunc_half = Eigen::ArrayXd::Constant(n_max_jumps + 1, kLogZero);
  const int half = L / 2;
  walk_ladder_levels(env, law, params, L, n_max_jumps,
                     [&](int level, const Eigen::ArrayXd& row) {
                       t.log_G.row(level) = row.transpose();
                       t.log_F_trunc[level] = log_sum_exp(row);
                       t.log_F_trunc_half[level] =
                           log_sum_exp_range(row, 0, half + 1);
                       return true;
                     });
  t.law_spec = law.spec_string();
  t.law_checksum = law.checksum;
  t.env_checksum = env.checksum;
  t.engine = std::string("reference-") + kEngineVersion;
  return t;
}

double ladder_column_sum(const LadderTables& tables, int n) {
  if (n < 0 || n > tables.L) throw ConfigError("column index out of range");
  LogAccumulator acc;
  for (int level = 0; level <= tables.n_max_jumps; ++level)
    acc.add(tables.log_G(level, n));
  return acc.value();
}

EventWeight event_restricted(const LadderTables& tables, int n,
                             int n0_jumps) {
  if (n < 1 || n > tables.L) throw ConfigError("event_restricted: n out of range");
  if (n0_jumps < 1 || n0_jumps > tables.n_max_jumps)
    throw ConfigError("event_restricted: 1 <= N0 <= n_max_jumps required");
  EventWeight ev;
  LogAccumulator acc;
  for (int level = n0_jumps; level <= tables.n_max_jumps; ++level)
    acc.add(tables.log_G(level, n));
  ev.log_value = acc.value();
  // Paths cannot make more than n jumps, so depth >= n means nothing was
  // cut off.
  ev.exact = tables.n_max_jumps >= n;
  if (!ev.exact) {
    const double last = tables.log_G(tables.n_max_jumps, n);
    const double prev = tables.log_G(tables.n_max_jumps - 1, n);
    if (is_log_zero(last)) {
      ev.exact = true;  // ladder died out before the cap
      ev.log_tail_bound = kLogZero;
    } else if (!is_log_zero(prev) && last < prev) {
      const double r = std::exp(last - prev);
      ev.log_tail_bound = last + std::log(r) - std::log1p(-r);
    } else {
      ev.log_tail_bound = std::numeric_limits<double>::infinity();
    }
  }
  return ev;
}

Eigen::ArrayXd contact_distribution(const LadderTables& tables, int n) {
  if (n < 0 || n > tables.L)
    throw ConfigError("contact_distribution: n out of range");
  if (tables.n_max_jumps < n)
    throw TruncationError(
        "contact_distribution requires n_max_jumps >= n for exactness");
  const int depth = tables.n_max_jumps;
  Eigen::ArrayXd col(depth + 1);
  for (int level = 0; level <= depth; ++level) col[level] = tables.log_G(level, n);
  const double total = log_sum_exp(col);
  if (is_log_zero(total))
    throw ConfigError("contact_distribution: zero partition at endpoint");
  Eigen::ArrayXd p(depth + 1);
  for (int level = 0; level <= depth; ++level)
    p[level] = is_log_zero(col[level]) ? 0.0 : std::exp(col[level] - total);
  return p;
}

LadderAudit ladder_interchange_audit(const Environment& env,
                                     const RenewalLaw& law,
                                     const ModelParams& params,
                                     std::vector<int> checkpoints,
                                     bool adaptive, double rel_tail_tol,
                                     int max_levels) {
  validate(params);
  if (checkpoints.empty()) throw ConfigError("audit needs checkpoints");
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()),
                    checkpoints.end());
  if (checkpoints.front() < 1) throw ConfigError("checkpoints must be >= 1");
  const int L = checkpoints.back();
  check_horizon(env, law, L);
  if (max_levels < 0) max_levels = L;
  max_levels = std::min(max_levels, L);
  const int ncp = static_cast<int>(checkpoints.size());

  LadderAudit audit;
  audit.checkpoints = checkpoints;

  const Eigen::ArrayXd log_Z = compute_constrained(env, law, params, L);
  audit.log_sum_Z.resize(ncp);
  {
    LogAccumulator acc;
    int k = 0;
    for (int n = 1; n <= L; ++n) {
      acc.add(log_Z[n]);
      while (k < ncp && checkpoints[k] == n) audit.log_sum_Z[k++] = acc.value();
    }
  }

  std::vector<std::vector<double>> rows_f(ncp);  // per checkpoint, per level
  std::vector<LogAccumulator> tot_f(ncp);
  std::vector<LogAccumulator> colacc(L + 1);
  colacc[0].add(0.0);  // G_{0,0}

  // Trailing full-horizon row sums, for the geometric stopping bound.
  std::vector<double> recent;

  walk_ladder_levels(
      env, law, params, L, max_levels,
      [&](int level, const Eigen::ArrayXd& row) {
        LogAccumulator acc;
        int k = 0;
        while (k < ncp && checkpoints[k] < level) {
          rows_f[k].push_back(kLogZero);
          ++k;
        }
        int kk = k;
        for (int n = level; n <= L; ++n) {
          const double v = row[n];
          acc.add(v);
          colacc[n].add(v);
          while (kk < ncp && checkpoints[kk] == n) {
            rows_f[kk].push_back(acc.value());
            ++kk;
          }
        }
        for (int i = k; i < ncp; ++i) tot_f[i].add(rows_f[i][level - 1]);
        audit.levels = level;

        const double full = rows_f[ncp - 1][level - 1];
        if (is_log_zero(full)) {
          // All deeper rows vanish too: G_{N+1} is built from G_N.
          audit.converged = true;
          audit.log_tail_bound = kLogZero;
          return false;
        }
        recent.push_back(full);
        if (adaptive && level >= 12 && recent.size() >= 5) {
          const size_t s = recent.size();
          double rmax = 0.0;
          bool ok = true;
          for (size_t i = s - 4; i < s; ++i) {
            const double r = std::exp(recent[i] - recent[i - 1]);
            if (!(r < 0.999)) ok = false;
            rmax = std::max(rmax, r);
          }
          if (ok) {
            const double logtail =
                full + std::log(rmax) - std::log1p(-rmax);
            if (logtail <=
                tot_f[ncp - 1].value() + std::log(rel_tail_tol)) {
              audit.converged = true;
              audit.log_tail_bound = logtail;
              return false;
            }
          }
        }
        // Localized parameters: the ladder keeps growing level after
        // level; stop once that is unambiguous instead of burning O(L^3).
        if (adaptive && level >= 48 && recent.size() >= 9) {
          const size_t s = recent.size();
          bool growing = true;
          for (size_t i = s - 8; i < s; ++i)
            if (!(recent[i] > recent[i - 1] + 0.02)) growing = false;
          if (growing) {
            audit.diverging = true;
            audit.log_tail_bound = std::numeric_limits<double>::infinity();
            return false;
          }
        }
        return true;
      });

  audit.exhausted = audit.levels >= L;
  if (audit.exhausted) {
    audit.converged = true;
    audit.log_tail_bound = kLogZero;
  }

  audit.log_sum_F.resize(ncp);
  audit.log_F.resize(ncp);
  for (int k = 0; k < ncp; ++k) {
    audit.log_sum_F[k] = tot_f[k].value();
    Eigen::ArrayXd f(audit.levels + 1);
    f[0] = kLogZero;
    for (int level = 1; level <= audit.levels; ++level)
      f[level] = rows_f[k][level - 1];
    audit.log_F[k] = std::move(f);
  }
  audit.log_colsum.resize(L + 1);
  for (int n = 0; n <= L; ++n) audit.log_colsum[n] = colacc[n].value();
  return audit;
}

void export_tables(const LadderTables& t, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw DataFormatError("cannot open " + path.string() + " for writing");
  char buf[64];
  auto fmt = [&](double v) -> const char* {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  };
  os << "# pinlab tables v1\n";
  os << "# engine: " << t.engine << "\n";
  os << "# law: " << t.law_spec << " checksum=" << std::hex << t.law_checksum
     << std::dec << "\n";
  os << "# env: checksum=" << std::hex << t.env_checksum << std::dec << "\n";
  os << "# params: beta=" << fmt(t.params.beta);
  os << " h=" << fmt(t.params.h) << "\n";
  os << "# L=" << t.L << " Nmax=" << t.n_max_jumps << "\n";
  os << "# records: Z n logZ | ZF n logZf | F N logF logFhalf | G N n logG\n";
  for (int n = 0; n <= t.L; ++n) os << "Z " << n << " " << fmt(t.log_Z[n]) << "\n";
  for (int n = 0; n <= t.L; ++n)
    os << "ZF " << n << " " << fmt(t.log_Z_free[n]) << "\n";
  for (int level = 1; level <= t.n_max_jumps; ++level) {
    os << "F " << level << " " << fmt(t.log_F_trunc[level]);
    os << " " << fmt(t.log_F_trunc_half[level]) << "\n";
  }
  for (int level = 0; level <= t.n_max_jumps; ++level)
    for (int n = 0; n <= t.L; ++n)
      if (!is_log_zero(t.log_G(level, n)))
        os << "G " << level << " " << n << " " << fmt(t.log_G(level, n)) << "\n";
  if (!os) throw DataFormatError("short write to " + path.string());
}

}  // namespace pinlab
