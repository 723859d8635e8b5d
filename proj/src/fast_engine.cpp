#include "pinlab/fast_engine.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "pinlab/errors.hpp"
#include "pinlab/logspace.hpp"
#include "pinlab/partition_engine.hpp"

namespace pinlab {

namespace {

using cd = std::complex<double>;

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Radix-2 FFT with tabulated twiddles (no incremental rotation, so phase
// error does not grow with transform size).
class Fft {
 public:
  void transform(std::vector<cd>& a, bool inverse) {
    const int n = static_cast<int>(a.size());
    if (n <= 1) return;
    if (inverse)
      for (auto& x : a) x = std::conj(x);
    for (int i = 1, j = 0; i < n; ++i) {
      int bit = n >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      if (i < j) std::swap(a[i], a[j]);
    }
    const auto& w = roots(n);
    for (int len = 2; len <= n; len <<= 1) {
      const int step = n / len;
      for (int i = 0; i < n; i += len)
        for (int j = 0; j < len / 2; ++j) {
          const cd u = a[i + j];
          const cd v = a[i + j + len / 2] * w[static_cast<size_t>(j) * step];
          a[i + j] = u + v;
          a[i + j + len / 2] = u - v;
        }
    }
    if (inverse) {
      const double inv = 1.0 / n;
      for (auto& x : a) x = std::conj(x) * inv;
    }
  }

 private:
  const std::vector<cd>& roots(int n) {
    auto it = roots_.find(n);
    if (it != roots_.end()) return it->second;
    std::vector<cd> w(n / 2);
    for (int j = 0; j < n / 2; ++j)
      w[j] = std::polar(1.0, -2.0 * M_PI * j / n);
    return roots_.emplace(n, std::move(w)).first->second;
  }
  std::map<int, std::vector<cd>> roots_;
};

// Gap distances below 2^kMinOctave are accumulated directly in log domain.
constexpr int kMinOctave = 5;

}  // namespace

double max_abs_log_deviation(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b) {
  if (a.size() != b.size())
    throw ConfigError("max_abs_log_deviation: size mismatch");
  double dev = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const bool za = is_log_zero(a[i]), zb = is_log_zero(b[i]);
    if (za && zb) continue;
    if (za != zb) return std::numeric_limits<double>::infinity();
    dev = std::max(dev, std::abs(a[i] - b[i]));
  }
  return dev;
}

// Online convolution with dyadic scheduling: a pair (source j, gap d) with
// d in the octave [2^k, 2^{k+1}) is processed when the size-2^k source
// block containing j completes, as one FFT of the rescaled block against
// the rescaled kernel octave.  Matching block and octave sizes keeps the
// kernel spread inside any transform at a factor 2^{1+alpha}, so FFT
// roundoff stays a bounded multiple of every output it can land on --
// which is exactly what the per-element 1e-9 contract needs.
Eigen::ArrayXd compute_constrained_fast(const Environment& env,
                                        const RenewalLaw& law,
                                        const ModelParams& params, int L,
                                        FastEngineDiagnostics* diag) {
  validate(params);
  FastEngineDiagnostics scratch;
  FastEngineDiagnostics* d = diag ? diag : &scratch;
  *d = FastEngineDiagnostics{};
  // The Geometric family's exponential kernel spans an unbounded ratio
  // over any octave; it is an oracle-only family, served by the reference
  // engine.  Small horizons are not worth scheduling either.
  if (law.family == LawFamily::Geometric || L <= 8 * (1 << kMinOctave)) {
    d->reference_fallback = true;
    return compute_constrained(env, law, params, L);
  }
  if (L > env.length() || L > law.n_table())
    throw ConfigError("horizon exceeds environment or law table");

  const Eigen::ArrayXd w = params.beta * env.charges.head(L) - params.h;
  const Eigen::ArrayXd& log_mass = law.log_mass_table;
  const bool even_law = law.even_support();

  // Kernel octaves, transformed once.
  struct Octave {
    int d_lo = 0, d_hi = 0, nfft = 0;
    double log_peak = kLogZero;
    std::vector<cd> kernel_fft;
  };
  Fft fft;
  std::vector<Octave> octaves;
  for (int k = kMinOctave; (1 << k) <= L; ++k) {
    Octave oct;
    oct.d_lo = 1 << k;
    oct.d_hi = std::min(L, (1 << (k + 1)) - 1);
    const int width = oct.d_hi - oct.d_lo + 1;
    oct.nfft = next_pow2((1 << k) + width - 1);
    for (int g = oct.d_lo; g <= oct.d_hi; ++g)
      oct.log_peak = std::max(oct.log_peak, log_mass[g]);
    oct.kernel_fft.assign(oct.nfft, cd(0.0, 0.0));
    for (int t = 0; t < width; ++t) {
      const double lk = log_mass[oct.d_lo + t];
      if (lk >= oct.log_peak + kNegligibleLog)
        oct.kernel_fft[t] = std::exp(lk - oct.log_peak);
    }
    fft.transform(oct.kernel_fft, false);
    d->fft_count += 1;
    octaves.push_back(std::move(oct));
  }

  Eigen::ArrayXd log_Z(L + 1);
  log_Z[0] = 0.0;
  Eigen::ArrayXd src(L);
  src[0] = w[0];
  std::vector<LogAccumulator> acc(static_cast<size_t>(L) + 1);
  std::vector<cd> block;

  // Source block [a, a + 2^k) against kernel octave k, rescaled by the
  // block peak, merged back through the log accumulators.
  auto flush = [&](size_t oi, int a) {
    const Octave& oct = octaves[oi];
    const int bs = oct.d_lo;  // block size = octave base
    double smax = kLogZero;
    for (int j = a; j < a + bs; ++j) smax = std::max(smax, src[j]);
    if (is_log_zero(smax)) return;
    block.assign(oct.nfft, cd(0.0, 0.0));
    double fasum = 0.0;
    for (int i = 0; i < bs; ++i) {
      const double sv = src[a + i];
      if (sv >= smax + kNegligibleLog) {  // negligible against the block peak
        const double f = std::exp(sv - smax);
        block[i] = f;
        fasum += f;
      }
    }
    if (fasum <= 0.0) return;
    fft.transform(block, false);
    for (int i = 0; i < oct.nfft; ++i) block[i] *= oct.kernel_fft[i];
    fft.transform(block, true);
    d->fft_count += 2;
    d->segment_count += 1;

    const double scale = smax + oct.log_peak;
    // conv of bs sources with a (d_hi - d_lo + 1)-wide kernel
    const int q_hi = bs + (oct.d_hi - oct.d_lo) - 1;
    double peak = 0.0;
    for (int q = 0; q <= q_hi; ++q)
      peak = std::max(peak, block[q].real());
    d->max_bound_ratio = std::max(d->max_bound_ratio, peak / fasum);
    const int n_lo = a + oct.d_lo;
    for (int q = 0; q <= q_hi; ++q) {
      const int n = n_lo + q;
      if (n > L) break;
      if (even_law && (n & 1)) continue;  // structurally zero
      const double v = block[q].real();
      if (v <= 0.0) continue;  // exact zero or transform noise on one
      acc[n].add(scale + std::log(v));
    }
  };

  const int direct_window = 1 << kMinOctave;
  for (int n = 1; n <= L; ++n) {
    for (size_t oi = 0; oi < octaves.size(); ++oi) {
      const int bs = octaves[oi].d_lo;
      if (n % bs == 0) flush(oi, n - bs);
    }
    LogAccumulator& an = acc[n];
    for (int j = std::max(0, n - direct_window + 1); j < n; ++j)
      an.add(src[j] + log_mass[n - j]);
    log_Z[n] = an.value();
    if (n < L) src[n] = log_Z[n] + w[n];
  }
  return log_Z;
}

}  // namespace pinlab
