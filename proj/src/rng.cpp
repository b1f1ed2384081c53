#include "cogarch/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace cogarch {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::uint32_t c[4], std::uint32_t k0, std::uint32_t k1) {
  const std::uint64_t p0 = std::uint64_t(kMul0) * c[0];
  const std::uint64_t p1 = std::uint64_t(kMul1) * c[2];
  const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
  const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
  c[0] = hi1 ^ c[1] ^ k0;
  c[1] = lo1;
  c[2] = hi0 ^ c[3] ^ k1;
  c[3] = lo0;
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint32_t replication,
                     StreamRole role, std::uint16_t path) {
  std::uint64_t s = master_seed;
  const std::uint64_t k = splitmix64(s);
  key_[0] = std::uint32_t(k);
  key_[1] = std::uint32_t(k >> 32);
  hi_[0] = replication;
  hi_[1] = (std::uint32_t(role) << 16) | path;
}

void RngStream::seek_cell(std::uint64_t cell) {
  if (cell >> 32) throw std::invalid_argument("RngStream: cell index exceeds 2^32");
  cell_ = std::uint32_t(cell);
  block_ = 0;
  lane_ = 4;
}

void RngStream::refill() {
  std::uint32_t c[4] = {block_, cell_, hi_[1], hi_[0]};
  std::uint32_t k0 = key_[0], k1 = key_[1];
  for (int r = 0; r < 10; ++r) {
    philox_round(c, k0, k1);
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  buf_[0] = c[0];
  buf_[1] = c[1];
  buf_[2] = c[2];
  buf_[3] = c[3];
  ++block_;
  lane_ = 0;
}

std::uint64_t RngStream::bits() {
  if (lane_ > 2) refill();
  const std::uint64_t v = std::uint64_t(buf_[lane_]) | (std::uint64_t(buf_[lane_ + 1]) << 32);
  lane_ += 2;
  return v;
}

double RngStream::uniform() {
  return double((bits() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

double RngStream::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::invalid_argument("gamma: shape and scale must be positive");
  if (shape < 1.0) {
    // Boost to shape + 1 and thin with a power of a uniform.
    const double u = uniform();
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze method.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return scale * d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return scale * d * v;
  }
}

unsigned RngStream::poisson(double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be nonnegative");
  unsigned k = 0;
  double acc = -std::log(uniform());
  while (acc <= mean) {
    ++k;
    acc -= std::log(uniform());
  }
  return k;
}

}  // namespace cogarch
