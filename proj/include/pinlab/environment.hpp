#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>

namespace pinlab {

enum class ChargeDist { StandardGaussian, Rademacher, CenteredUniform };

std::string dist_name(ChargeDist d);
ChargeDist parse_dist(const std::string& name, double* half_width);

// Inverse temperature and pinning bias.  The model is usually posed with
// h >= 0; the engine accepts any real h so the homogeneous localized-phase
// oracles (beta = 0, h < 0) can run.
struct ModelParams {
  double beta = 0.0;
  double h = 0.0;
};

void validate(const ModelParams& params);

// A quenched realization of the charge sequence.  Immutable once built;
// regenerating from (dist, seed, length) reproduces the charges bit for bit.
struct Environment {
  ChargeDist dist = ChargeDist::StandardGaussian;
  double half_width = 0.0;  // CenteredUniform only
  uint64_t seed = 0;
  Eigen::ArrayXd charges;
  uint64_t checksum = 0;  // FNV-1a over the charge bytes

  int length() const { return static_cast<int>(charges.size()); }
};

// Charges come off one xoshiro256++ stream seeded with `seed`:
// Gaussian draws two words per charge (Box-Muller, cosine branch),
// Rademacher the sign bit of one word, CenteredUniform one word mapped
// affinely onto [-a, a).
Environment generate_environment(ChargeDist dist, uint64_t seed, int length,
                                 double half_width = 0.0);

// log E[exp(beta * omega)]: beta^2/2 (Gaussian), log cosh beta
// (Rademacher), log(sinh(a beta)/(a beta)) (CenteredUniform).
double log_mgf(ChargeDist dist, double beta, double half_width = 0.0);

// Binary format, little-endian throughout:
//   magic "PINENV1" | dist tag (1 byte) | seed (8) | length (8)
//   | half_width (8, CenteredUniform only) | charges (8 each)
//   | FNV-1a checksum (8) over everything after the magic.
void persist_environment(const Environment& env,
                         const std::filesystem::path& path);
Environment load_environment(const std::filesystem::path& path);

}  // namespace pinlab
