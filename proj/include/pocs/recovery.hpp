#pragma once

#include <limits>
#include <optional>

#include "pocs/reformulation.hpp"
#include "pocs/sensing.hpp"
#include "pocs/solvers.hpp"

namespace pocs {

/// A trial succeeds when its error falls below this.
inline constexpr double kSuccessThreshold = 1e-3;

enum class OutcomeFlag {
  none,
  zero_estimate,     // the solver returned 0; direction error is the sentinel 1
  degenerate_scale,  // dithered recovery: |t_sharp| too small to rescale
};

template <class Signal>
struct RecoveryOutcome {
  Signal xhat;
  /// ||xhat/||xhat|| - x/||x|| ||; NaN when no truth was supplied.
  double direction_error = std::numeric_limits<double>::quiet_NaN();
  /// ||xhat - reference||, for pipelines that recover the norm too.
  std::optional<double> full_error;
  RecoveryReport report;
  bool success = false;
  OutcomeFlag flag = OutcomeFlag::none;
  /// Dithered recovery only: |Im(t_sharp)| / |t_sharp|, the imaginary residue
  /// of the coordinate that should equal a positive multiple of rho.
  std::optional<double> scale_residue;
};

using SparseOutcome = RecoveryOutcome<ComplexVector>;

struct LowRankOutcome {
  ComplexMatrix xhat;
  double direction_error = std::numeric_limits<double>::quiet_NaN();
  MatrixRecoveryReport report;
  bool success = false;
  OutcomeFlag flag = OutcomeFlag::none;
};

/// ||xhat/||xhat|| - x/||x|| || (Frobenius for matrices). Returns 1 when xhat = 0.
double direction_error(const ComplexVector& xhat, const ComplexVector& x);
double direction_error(const ComplexMatrix& xhat, const ComplexMatrix& x);

/// Basis pursuit on A_{z,r} (real field) or A_{z,c} (complex field).
/// Success, when truth is given, is direction_error < threshold.
SparseOutcome recover_sparse(const SensingEnsemble& ens, const PhaseObservation& obs, Field field,
                             const SolverOptions& opts = {},
                             const std::optional<ComplexVector>& truth = std::nullopt,
                             double threshold = kSuccessThreshold);

/// Classical CS from full measurements y = Phi x through the stacked real system
/// [Re -Im; Im Re] u = [Re y; Im y]. Success is full_error = ||xhat - x|| < threshold.
SparseOutcome recover_linear_cs(const SensingEnsemble& ens, const ComplexVector& y,
                                const SolverOptions& opts = {},
                                const std::optional<ComplexVector>& truth = std::nullopt,
                                double threshold = kSuccessThreshold);

/// Dithered recovery with norm: solve on the extended system, then
/// xhat = (rho / t_sharp) * x_sharp[0:n] with t_sharp the last coordinate.
/// Success is ||xhat - x|| < threshold.
SparseOutcome recover_full_dithered(const DitheredEnsemble& dens, const PhaseObservation& obs,
                                    const SolverOptions& opts = {},
                                    const std::optional<ComplexVector>& truth = std::nullopt,
                                    double threshold = kSuccessThreshold);

/// Basis pursuit denoising with epsilon = sqrt(2) tau0 on the system built from
/// the corrupted phases. full_error is measured against kappa m / ||Phi x||_1 * x.
SparseOutcome recover_noisy(const SensingEnsemble& ens, const PhaseObservation& corrupted, double tau0,
                            const SolverOptions& opts = {},
                            const std::optional<ComplexVector>& truth = std::nullopt,
                            double threshold = kSuccessThreshold);

/// Nuclear-norm minimisation on the low-rank reformulation; Xhat = [Uhat]_C.
LowRankOutcome recover_lowrank(const LowRankMap& map, const PhaseObservation& obs,
                               const SolverOptions& opts = {},
                               const std::optional<ComplexMatrix>& truth = std::nullopt,
                               double threshold = kSuccessThreshold);

}  // namespace pocs
