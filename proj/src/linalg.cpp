#include "pocs/linalg.hpp"

#include <cmath>

namespace pocs {

RealMatrix to_real(const ComplexMatrix& a) {
  RealMatrix out(2 * a.rows(), a.cols());
  out.topRows(a.rows()) = a.real();
  out.bottomRows(a.rows()) = a.imag();
  return out;
}

ComplexMatrix to_complex(const RealMatrix& b) {
  if (b.rows() % 2 != 0) {
    throw DimensionError("to_complex: row count " + std::to_string(b.rows()) + " is odd");
  }
  const auto m = b.rows() / 2;
  ComplexMatrix out(m, b.cols());
  out.real() = b.topRows(m);
  out.imag() = b.bottomRows(m);
  return out;
}

RealVector embed_vector(const ComplexVector& u) {
  RealVector out(2 * u.size());
  out.head(u.size()) = u.real();
  out.tail(u.size()) = u.imag();
  return out;
}

ComplexVector unembed_vector(const RealVector& u) {
  if (u.size() % 2 != 0) {
    throw DimensionError("unembed_vector: length " + std::to_string(u.size()) + " is odd");
  }
  const auto n = u.size() / 2;
  ComplexVector out(n);
  out.real() = u.head(n);
  out.imag() = u.tail(n);
  return out;
}

Complex phase(Complex a) {
  if (a == Complex{0.0, 0.0}) return {0.0, 0.0};
  const double r = std::hypot(a.real(), a.imag());
  return {a.real() / r, a.imag() / r};
}

ComplexVector phase(const ComplexVector& a) {
  ComplexVector out(a.size());
  for (Eigen::Index k = 0; k < a.size(); ++k) out[k] = phase(a[k]);
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(master) ^ a) ^ b);
}

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t state = seed;
  for (auto& word : s_) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    word = z ^ (z >> 31);
  }
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::uniform_index(std::uint64_t bound) {
  if (bound == 0) throw ParameterError("uniform_index: bound must be positive");
  // Lemire-style rejection keeps the draw exactly uniform.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % bound;
  }
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re, im};
}

ComplexMatrix sample_complex_gaussian(int m, int n, Rng& rng) {
  if (m < 1 || n < 1) throw ParameterError("sample_complex_gaussian: m and n must be >= 1");
  ComplexMatrix out(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = rng.complex_normal();
  return out;
}

}  // namespace pocs
