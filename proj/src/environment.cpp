#include "pinlab/environment.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "pinlab/errors.hpp"
#include "pinlab/rng.hpp"

namespace pinlab {

namespace {

constexpr char kMagic[7] = {'P', 'I', 'N', 'E', 'N', 'V', '1'};

void put_u64(std::vector<unsigned char>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

uint64_t get_u64(const unsigned char* p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p[i]) << (8 * i);
  return v;
}

// The serialized payload (everything after the magic, before the trailing
// checksum).  The in-memory provenance checksum is the FNV-1a digest of
// exactly these bytes, so it always matches the on-disk one.
std::vector<unsigned char> payload_bytes(const Environment& env) {
  std::vector<unsigned char> payload;
  payload.reserve(32 + 8 * static_cast<size_t>(env.length()));
  payload.push_back(static_cast<unsigned char>(env.dist));
  put_u64(payload, env.seed);
  put_u64(payload, static_cast<uint64_t>(env.length()));
  if (env.dist == ChargeDist::CenteredUniform)
    put_u64(payload, std::bit_cast<uint64_t>(env.half_width));
  for (int i = 0; i < env.length(); ++i)
    put_u64(payload, std::bit_cast<uint64_t>(env.charges[i]));
  return payload;
}

uint64_t charges_checksum(const Environment& env) {
  const auto payload = payload_bytes(env);
  return fnv1a_bytes(payload);
}

}  // namespace

std::string dist_name(ChargeDist d) {
  switch (d) {
    case ChargeDist::StandardGaussian: return "gaussian";
    case ChargeDist::Rademacher: return "rademacher";
    case ChargeDist::CenteredUniform: return "uniform";
  }
  return "?";
}

ChargeDist parse_dist(const std::string& name, double* half_width) {
  std::string s = name;
  for (auto& c : s) c = static_cast<char>(std::tolower(c));
  const auto colon = s.find(':');
  const std::string base = s.substr(0, colon);
  if (base == "gaussian" || base == "standardgaussian")
    return ChargeDist::StandardGaussian;
  if (base == "rademacher") return ChargeDist::Rademacher;
  if (base == "uniform" || base == "centereduniform") {
    double a = std::sqrt(3.0);  // unit variance by default
    if (colon != std::string::npos) {
      try {
        a = std::stod(s.substr(colon + 1));
      } catch (const std::exception&) {
        throw ConfigError("cannot parse uniform half-width in '" + name + "'");
      }
    }
    if (!(a > 0.0)) throw ConfigError("uniform half-width must be positive");
    if (half_width) *half_width = a;
    return ChargeDist::CenteredUniform;
  }
  throw ConfigError("unknown charge distribution '" + name + "'");
}

void validate(const ModelParams& params) {
  if (!(params.beta >= 0.0) || !std::isfinite(params.beta))
    throw ConfigError("beta must be a finite nonnegative real");
  if (!std::isfinite(params.h)) throw ConfigError("h must be finite");
}

Environment generate_environment(ChargeDist dist, uint64_t seed, int length,
                                 double half_width) {
  if (length < 1) throw ConfigError("environment length must be positive");
  if (dist == ChargeDist::CenteredUniform && !(half_width > 0.0))
    throw ConfigError("CenteredUniform requires a positive half-width");

  Environment env;
  env.dist = dist;
  env.seed = seed;
  env.half_width = dist == ChargeDist::CenteredUniform ? half_width : 0.0;
  env.charges.resize(length);

  Xoshiro256pp rng(seed);
  switch (dist) {
    case ChargeDist::StandardGaussian:
      for (int i = 0; i < length; ++i) env.charges[i] = rng.next_gaussian();
      break;
    case ChargeDist::Rademacher:
      for (int i = 0; i < length; ++i) env.charges[i] = rng.next_rademacher();
      break;
    case ChargeDist::CenteredUniform:
      for (int i = 0; i < length; ++i)
        env.charges[i] = rng.next_uniform_sym(half_width);
      break;
  }
  env.checksum = charges_checksum(env);
  return env;
}

double log_mgf(ChargeDist dist, double beta, double half_width) {
  if (!(beta >= 0.0)) throw ConfigError("log_mgf requires beta >= 0");
  switch (dist) {
    case ChargeDist::StandardGaussian:
      return 0.5 * beta * beta;
    case ChargeDist::Rademacher: {
      // log cosh, overflow-safe
      const double b = std::abs(beta);
      return b + std::log1p(std::exp(-2.0 * b)) - std::log(2.0);
    }
    case ChargeDist::CenteredUniform: {
      const double x = half_width * beta;
      if (!(half_width > 0.0))
        throw ConfigError("log_mgf(CenteredUniform) needs a half-width");
      if (x < 1e-4) {
        // log(sinh x / x) = x^2/6 - x^4/180 + O(x^6)
        const double x2 = x * x;
        return x2 / 6.0 - x2 * x2 / 180.0;
      }
      return std::log(std::sinh(x) / x);
    }
  }
  return 0.0;
}

void persist_environment(const Environment& env,
                         const std::filesystem::path& path) {
  const std::vector<unsigned char> payload = payload_bytes(env);
  const uint64_t sum = fnv1a_bytes(payload);

  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataFormatError("cannot open " + path.string() + " for writing");
  os.write(kMagic, sizeof(kMagic));
  os.write(reinterpret_cast<const char*>(payload.data()),
           static_cast<std::streamsize>(payload.size()));
  std::vector<unsigned char> sumbytes;
  put_u64(sumbytes, sum);
  os.write(reinterpret_cast<const char*>(sumbytes.data()), 8);
  if (!os) throw DataFormatError("short write to " + path.string());
}

Environment load_environment(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataFormatError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < sizeof(kMagic) + 17 + 8)
    throw DataFormatError("environment file truncated: " + path.string());
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw DataFormatError("bad magic / unsupported version in " + path.string());

  const unsigned char* p = bytes.data() + sizeof(kMagic);
  const size_t payload_size = bytes.size() - sizeof(kMagic) - 8;

  const unsigned char tag = p[0];
  if (tag > 2) throw DataFormatError("unknown distribution tag in environment file");
  Environment env;
  env.dist = static_cast<ChargeDist>(tag);
  env.seed = get_u64(p + 1);
  const uint64_t length = get_u64(p + 9);
  size_t off = 17;
  if (env.dist == ChargeDist::CenteredUniform) {
    if (payload_size < off + 8)
      throw DataFormatError("environment file truncated: " + path.string());
    env.half_width = std::bit_cast<double>(get_u64(p + off));
    off += 8;
  }
  if (length == 0 || length > (1ULL << 33))
    throw DataFormatError("implausible charge count in environment file");
  if (payload_size != off + 8 * length)
    throw DataFormatError("environment file truncated: header declares " +
                          std::to_string(length) + " charges");

  const uint64_t stored_sum = get_u64(bytes.data() + bytes.size() - 8);
  const uint64_t actual_sum =
      fnv1a_bytes(std::span<const unsigned char>(p, payload_size));
  if (stored_sum != actual_sum)
    throw DataFormatError("environment checksum mismatch in " + path.string());

  env.charges.resize(static_cast<Eigen::Index>(length));
  for (uint64_t i = 0; i < length; ++i)
    env.charges[static_cast<Eigen::Index>(i)] =
        std::bit_cast<double>(get_u64(p + off + 8 * i));
  env.checksum = charges_checksum(env);
  return env;
}

}  // namespace pinlab
