#include "pinlab/rng.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>

namespace pinlab {

namespace {

inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

uint64_t SplitMix64::next() {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Xoshiro256pp::Xoshiro256pp(uint64_t seed) {
  SplitMix64 sm(seed);
  for (auto& w : s_) w = sm.next();
}

uint64_t Xoshiro256pp::next_u64() {
  const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256pp::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Xoshiro256pp::next_unit_open() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Xoshiro256pp::next_gaussian() {
  const double u1 = next_unit_open();
  const double u2 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double Xoshiro256pp::next_rademacher() {
  return (next_u64() >> 63) ? -1.0 : 1.0;
}

double Xoshiro256pp::next_uniform_sym(double half_width) {
  return half_width * (2.0 * next_unit() - 1.0);
}

void Fnv1a::update(std::span<const unsigned char> bytes) {
  uint64_t h = hash_;
  for (unsigned char b : bytes) {
    h ^= static_cast<uint64_t>(b);
    h *= 0x100000001b3ULL;
  }
  hash_ = h;
}

void Fnv1a::update_u64(uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  update(buf);
}

void Fnv1a::update_double(double v) {
  update_u64(std::bit_cast<uint64_t>(v));
}

uint64_t fnv1a_bytes(std::span<const unsigned char> bytes) {
  Fnv1a f;
  f.update(bytes);
  return f.digest();
}

}  // namespace pinlab
