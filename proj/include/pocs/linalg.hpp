#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace pocs {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Stacks Re(a) above Im(a): an m x n complex matrix becomes 2m x n real.
RealMatrix to_real(const ComplexMatrix& a);

/// Inverse of to_real. Throws DimensionError on an odd row count.
ComplexMatrix to_complex(const RealMatrix& b);

/// Real 2n-vector [Re(u); Im(u)]. Norm preserving.
RealVector embed_vector(const ComplexVector& u);

/// Inverse of embed_vector. Throws DimensionError on odd length.
ComplexVector unembed_vector(const RealVector& u);

/// a / |a| for nonzero a, 0 at exactly 0.
Complex phase(Complex a);

ComplexVector phase(const ComplexVector& a);

/// Expected modulus of a standard complex Gaussian N(0,1) + N(0,1)i, sqrt(pi/2).
constexpr double kappa() { return 1.2533141373155002512078826424055; }

/// xoshiro256** seeded through splitmix64.
///
/// Bit-for-bit reproducible across platforms: uniform doubles use the top 53
/// bits and normals use the polar Box-Muller method, neither of which depends
/// on the standard library's distribution implementations.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  result_type operator()() { return next_u64(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform integer on [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);
  double normal();
  /// N(0,1) + N(0,1)i.
  Complex complex_normal();

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// One splitmix64 finalisation step.
std::uint64_t splitmix64(std::uint64_t x);

/// Derives a stream seed from a master seed and two coordinates:
/// splitmix64(splitmix64(splitmix64(master) ^ a) ^ b).
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

/// m x n matrix with i.i.d. N(0,1) + N(0,1)i entries, drawn row by row.
ComplexMatrix sample_complex_gaussian(int m, int n, Rng& rng);

}  // namespace pocs
