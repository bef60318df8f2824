#include "pocs/recovery.hpp"

#include <cmath>

namespace pocs {

namespace {

template <class T>
double direction_error_impl(const T& xhat, const T& x) {
  if (xhat.rows() != x.rows() || xhat.cols() != x.cols()) throw DimensionError("direction_error: shape mismatch");
  const double nx = x.norm();
  if (nx == 0.0) throw ParameterError("direction_error: truth is zero");
  const double nh = xhat.norm();
  if (nh == 0.0) return 1.0;
  return (xhat / nh - x / nx).norm();
}

bool solver_failed(SolverStatus s) { return s == SolverStatus::infeasible || s == SolverStatus::numerical_error; }

void score_direction(SparseOutcome& out, const std::optional<ComplexVector>& truth, double threshold) {
  if (out.xhat.norm() == 0.0) out.flag = OutcomeFlag::zero_estimate;
  if (!truth) return;
  out.direction_error = direction_error(out.xhat, *truth);
  out.success = !solver_failed(out.report.status) && out.flag == OutcomeFlag::none &&
                out.direction_error < threshold;
}

}  // namespace

double direction_error(const ComplexVector& xhat, const ComplexVector& x) { return direction_error_impl(xhat, x); }

double direction_error(const ComplexMatrix& xhat, const ComplexMatrix& x) { return direction_error_impl(xhat, x); }

SparseOutcome recover_sparse(const SensingEnsemble& ens, const PhaseObservation& obs, Field field,
                             const SolverOptions& opts, const std::optional<ComplexVector>& truth,
                             double threshold) {
  SparseOutcome out;
  if (field == Field::real) {
    const auto sys = build_real(obs, ens);
    out.report = basis_pursuit(sys.a, sys.rhs(), opts);
    out.xhat = out.report.solution.cast<Complex>();
  } else {
    const auto sys = build_complex(obs, ens);
    out.report = basis_pursuit(sys.a, sys.rhs(), opts);
    out.xhat = unembed_vector(out.report.solution);
  }
  score_direction(out, truth, threshold);
  return out;
}

SparseOutcome recover_linear_cs(const SensingEnsemble& ens, const ComplexVector& y, const SolverOptions& opts,
                                const std::optional<ComplexVector>& truth, double threshold) {
  if (y.size() != ens.m()) throw DimensionError("recover_linear_cs: measurement length != m");
  const int m = ens.m();
  const int n = ens.n();
  RealMatrix a(2 * m, 2 * n);
  a.topLeftCorner(m, n) = ens.phi.real();
  a.topRightCorner(m, n) = -ens.phi.imag();
  a.bottomLeftCorner(m, n) = ens.phi.imag();
  a.bottomRightCorner(m, n) = ens.phi.real();

  SparseOutcome out;
  out.report = basis_pursuit(a, embed_vector(y), opts);
  out.xhat = unembed_vector(out.report.solution);
  if (out.xhat.norm() == 0.0) out.flag = OutcomeFlag::zero_estimate;
  if (truth) {
    if (truth->size() != n) throw DimensionError("recover_linear_cs: truth length != n");
    out.direction_error = direction_error(out.xhat, *truth);
    out.full_error = (out.xhat - *truth).norm();
    out.success = !solver_failed(out.report.status) && *out.full_error < threshold;
  }
  return out;
}

SparseOutcome recover_full_dithered(const DitheredEnsemble& dens, const PhaseObservation& obs,
                                    const SolverOptions& opts, const std::optional<ComplexVector>& truth,
                                    double threshold) {
  const int n = dens.base.n();
  const auto sys = build_dithered(obs, dens);
  SparseOutcome out;
  out.report = basis_pursuit(sys.a, sys.rhs(), opts);
  const ComplexVector sharp = unembed_vector(out.report.solution);
  const Complex t_sharp = sharp[n];
  if (std::abs(t_sharp) < 1e-9) {
    out.flag = OutcomeFlag::degenerate_scale;
    out.xhat = ComplexVector::Zero(n);
  } else {
    out.xhat = (dens.rho / t_sharp) * sharp.head(n);
    out.scale_residue = std::abs(t_sharp.imag()) / std::abs(t_sharp);
  }
  if (truth) {
    if (truth->size() != n) throw DimensionError("recover_full_dithered: truth length != n");
    out.direction_error = direction_error(out.xhat, *truth);
    out.full_error = (out.xhat - *truth).norm();
    out.success = !solver_failed(out.report.status) && out.flag == OutcomeFlag::none && *out.full_error < threshold;
  }
  return out;
}

SparseOutcome recover_noisy(const SensingEnsemble& ens, const PhaseObservation& corrupted, double tau0,
                            const SolverOptions& opts, const std::optional<ComplexVector>& truth,
                            double threshold) {
  if (!(tau0 >= 0.0) || !std::isfinite(tau0)) throw ParameterError("recover_noisy: tau0 must be >= 0");
  const auto sys = build_complex(corrupted, ens);
  SparseOutcome out;
  out.report = basis_pursuit_denoise(sys.a, sys.rhs(), std::sqrt(2.0) * tau0, opts);
  out.xhat = unembed_vector(out.report.solution);
  if (out.xhat.norm() == 0.0) out.flag = OutcomeFlag::zero_estimate;
  if (truth) {
    out.direction_error = direction_error(out.xhat, *truth);
    out.full_error = (out.xhat - rescaled_truth(ens, *truth)).norm();
    out.success = !solver_failed(out.report.status) && *out.full_error < threshold;
  }
  return out;
}

LowRankOutcome recover_lowrank(const LowRankMap& map, const PhaseObservation& obs, const SolverOptions& opts,
                               const std::optional<ComplexMatrix>& truth, double threshold) {
  const auto sys = build_lowrank(obs, map);
  LowRankOutcome out;
  out.report = nuclear_min(sys, opts);
  out.xhat = to_complex(out.report.solution);
  if (out.xhat.norm() == 0.0) out.flag = OutcomeFlag::zero_estimate;
  if (truth) {
    out.direction_error = direction_error(out.xhat, *truth);
    out.success = !solver_failed(out.report.status) && out.flag == OutcomeFlag::none &&
                  out.direction_error < threshold;
  }
  return out;
}

}  // namespace pocs
