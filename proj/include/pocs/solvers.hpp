#pragma once

#include <string>

#include "pocs/linalg.hpp"
#include "pocs/reformulation.hpp"

namespace pocs {

struct SolverOptions {
  double penalty = 1.0;     // ADMM augmented-Lagrangian parameter
  double over_relax = 1.5;  // relaxation in [1, 1.8]
  double abs_tol = 1e-7;
  double rel_tol = 1e-7;
  int max_iter = 10000;

  /// Throws ParameterError when a field is out of range.
  void validate() const;
};

enum class SolverStatus { converged, max_iter, infeasible, numerical_error };

std::string to_string(SolverStatus s);

template <class Solution>
struct SolveReport {
  Solution solution;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  SolverStatus status = SolverStatus::converged;
  /// True when the ADMM iterate was replaced by the exact solution on its support.
  bool polished = false;
};

using RecoveryReport = SolveReport<RealVector>;
using MatrixRecoveryReport = SolveReport<RealMatrix>;

/// `status,iterations,primal_residual,dual_residual`
template <class Solution>
std::string to_csv_record(const SolveReport<Solution>& r);

/// Entrywise sign(v) * max(|v| - threshold, 0).
RealVector soft_threshold(const RealVector& v, double threshold);

/// Shrinks the singular values of m by threshold.
RealMatrix singular_value_threshold(const RealMatrix& m, double threshold);

/// min ||u||_1 s.t. a u = b, by ADMM on the split u = v.
///
/// The u-step is the affine projection v - a^+ (a v - b), applied through a
/// factorisation of a a^T computed once (Cholesky when well conditioned, an
/// eigendecomposition on its range when rows are redundant, e.g. more
/// equations than unknowns). The v-step soft-thresholds at 1/penalty. On
/// convergence the support of the sparse iterate is re-solved exactly when
/// that yields a feasible, sign-consistent point. Status is infeasible when
/// b is not in the range of a.
RecoveryReport basis_pursuit(const RealMatrix& a, const RealVector& b, const SolverOptions& opts = {});

/// Euclidean projection onto {u : ||a u - b|| <= epsilon}.
///
/// Uses one SVD of a; each projection solves (I + lambda a^T a) u = v + lambda a^T b
/// for the multiplier lambda with a safeguarded Newton/bisection search.
class BallProjector {
 public:
  BallProjector(const RealMatrix& a, const RealVector& b, double epsilon);

  struct Result {
    RealVector point;
    double multiplier = 0.0;
    bool converged = true;
  };

  /// Feasible inputs come back unchanged with multiplier 0.
  Result project(const RealVector& v) const;

  /// Smallest achievable ||a u - b||.
  double min_residual() const { return min_residual_; }
  bool feasible() const { return min_residual_ <= epsilon_ + 1e-12 * std::max(1.0, b_norm_); }

 private:
  RealMatrix v_;           // right singular vectors, q x r
  RealVector sigma_;       // r
  RealVector c_;           // U^T b
  double constant_ = 0.0;  // squared residual no u can remove
  double epsilon_;
  double b_norm_;
  double min_residual_ = 0.0;
};

/// min ||u||_1 s.t. ||a u - b|| <= epsilon, by ADMM with the ball projection as u-step.
RecoveryReport basis_pursuit_denoise(const RealMatrix& a, const RealVector& b, double epsilon,
                                     const SolverOptions& opts = {});

/// min ||U||_* s.t. forward(U) = rhs.
///
/// The U-step projects onto the affine constraint set through the Gram matrix
/// forward o adjoint, factored once; the V-step is singular value thresholding
/// at 1/penalty. The returned solution is the thresholded (low-rank) iterate.
MatrixRecoveryReport nuclear_min(const LowRankSystem& sys, const SolverOptions& opts = {});

}  // namespace pocs
