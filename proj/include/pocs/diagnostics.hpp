#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pocs/reformulation.hpp"
#include "pocs/sensing.hpp"

namespace pocs {

using Support = std::vector<int>;

enum class RicMode { exact_enumeration, sampled };

/// Empirical restricted isometry constant of order `order`:
/// the max over examined supports T of max(sigma_max(A_T)^2 - 1, 1 - sigma_min(A_T)^2).
struct RicEstimate {
  double delta = 0.0;
  int order = 0;
  RicMode mode = RicMode::sampled;
  Support witness;
  long long samples = 0;
};

/// Distortion max(lambda_max - 1, 1 - lambda_min) of the Gram matrix of the columns in `support`.
double support_distortion(const RealMatrix& a, std::span<const int> support);

inline constexpr long long kDefaultEnumerationCap = 1'000'000;

/// Number of size-k subsets of q items, saturating at LLONG_MAX.
long long binomial(int q, int k);

/// Exact RIC by enumerating every support. Throws ParameterError when
/// C(q, order) exceeds `cap`; use the sampled estimator instead.
RicEstimate estimate_ric_exact(const RealMatrix& a, int order, long long cap = kDefaultEnumerationCap);

/// Lower bound on the RIC from `samples` uniformly drawn supports, plus any
/// `candidates` (adversarial supports, e.g. around the signal). The first k
/// random supports are the same for every sample budget >= k, so the estimate
/// is nondecreasing in `samples` under a fixed seed.
RicEstimate estimate_ric_sampled(const RealMatrix& a, int order, long long samples, Rng& rng,
                                 std::span<const Support> candidates = {});

/// Supports worth including in a sampled RIC probe of A_{z,c}: the embedded
/// support of x (real and imaginary coordinates), padded with random columns
/// to `order`, repeated `count` times.
std::vector<Support> signal_adjacent_supports(const ComplexVector& x, int order, int count, Rng& rng);

/// Sampled matrix RIC: max |‖A(U)‖^2 - ‖U‖_F^2| / ‖U‖_F^2 over random rank-`rank`
/// real matrices of the operator's input shape.
RicEstimate estimate_matrix_ric_sampled(const LowRankSystem& sys, int rank, long long samples, Rng& rng);

/// #{k : |Phi_k^* x| < eta}. x must be unit norm.
int count_near_vanishing(const SensingEnsemble& ens, const ComplexVector& x, double eta);

/// | ||Phi w||_1 / (kappa m) - 1 | for unit w.
double l1_concentration(const SensingEnsemble& ens, const ComplexVector& w);

struct SpeReport {
  double deviation = 0.0;
  int m = 0;
  int pair_count = 0;
};

/// max over pairs of |(1/(kappa m)) Re<sign(Phi u), Phi v> - Re<u, v>| / ||v||; pairs with v = 0 contribute 0.
SpeReport spe_deviation(const SensingEnsemble& ens,
                        std::span<const std::pair<ComplexVector, ComplexVector>> pairs);

/// Monte Carlo mean of |N(0,1) + N(0,1)i|.
double estimate_kappa(long long samples, Rng& rng);

}  // namespace pocs
