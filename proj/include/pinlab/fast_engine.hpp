#pragma once

#include <Eigen/Core>

#include "pinlab/environment.hpp"
#include "pinlab/renewal_law.hpp"

namespace pinlab {

struct FastEngineDiagnostics {
  // Largest observed ratio of a convolution output to its a-priori
  // rescaling bound (sum of rescaled sources times unit kernel peak).
  // Values above 1 + 1e-6 would mean the block-rescaling contract broke.
  double max_bound_ratio = 0.0;
  long long fft_count = 0;
  long long segment_count = 0;
  bool reference_fallback = false;
};

// Divide-and-conquer online convolution engine: identical contract to
// compute_constrained, O(L log^2 L).  Completed source blocks are rescaled
// by their peak exponent and convolved with the gap law via FFT, with the
// gap range split into geometric segments so the kernel never spans more
// than a bounded dynamic range inside one transform; results merge back
// into log-domain accumulators.
//
// The scheme needs a polynomially-varying kernel, i.e. the regular-
// variation families.  For the Geometric law (exponential kernel, oracle
// family only) it falls back to the reference engine and says so in the
// diagnostics.
Eigen::ArrayXd compute_constrained_fast(const Environment& env,
                                        const RenewalLaw& law,
                                        const ModelParams& params, int L,
                                        FastEngineDiagnostics* diag = nullptr);

// Largest |a[i] - b[i]| over two log sequences, treating a pair of
// -infinities as equal and a mismatch of zero against nonzero as +infinity.
// A log difference is exactly a relative deviation of the linear values.
double max_abs_log_deviation(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b);

}  // namespace pinlab
