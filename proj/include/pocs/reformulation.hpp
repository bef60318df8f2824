#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "pocs/sensing.hpp"

namespace pocs {

enum class SystemCase { real_sparse, complex_sparse, dithered, lowrank };

std::string to_string(SystemCase c);
SystemCase system_case_from_string(const std::string& tag);

/// Phase-row scaling that keeps the restricted isometry constant of the
/// reformulated matrix small: 1 for real signals, sqrt(2/3) for complex ones.
inline constexpr double kRealTHat = 1.0;
inline const double kComplexTHat = std::sqrt(2.0 / 3.0);

/// The real linear system a * u = e1 that a phase observation induces.
///
/// Row 0 is the virtual norm-fixing measurement (1/(kappa m)) Re(z^* Phi u);
/// rows 1..m are the phase-consistency rows scaled by t_hat / sqrt(m).
struct ReformulatedSystem {
  RealMatrix a;
  double t_hat = 1.0;
  double kappa = pocs::kappa();
  SystemCase kind = SystemCase::complex_sparse;
  int m = 0;
  /// Ambient dimension of the complex (or real) signal that was sensed,
  /// including the dither coordinate in the dithered case.
  int n = 0;

  Eigen::Index rows() const { return a.rows(); }
  Eigen::Index cols() const { return a.cols(); }
  /// e1 of length m + 1.
  RealVector rhs() const;
};

/// Matrix-free linear operator R^{2 n1 x n2} -> R^{m+1} and its adjoint.
struct LowRankSystem {
  std::function<RealVector(const RealMatrix&)> forward;
  std::function<RealMatrix(const RealVector&)> adjoint;
  Eigen::Index out_dim = 0;
  Eigen::Index rows = 0;  // 2 n1
  Eigen::Index cols = 0;  // n2
  /// Right-hand side; e1 for systems built from phases.
  RealVector rhs;
  double t_hat = 1.0;
  double kappa = pocs::kappa();
};

/// A_{z,r}: (m+1) x n, rows (1/(kappa m)) Re(z^* Phi) and (t_hat/sqrt(m)) Im(diag(conj z) Phi).
ReformulatedSystem build_real(const PhaseObservation& obs, const SensingEnsemble& ens,
                              double t_hat = kRealTHat);

/// A_{z,c}: (m+1) x 2n acting on [u_re; u_im].
ReformulatedSystem build_complex(const PhaseObservation& obs, const SensingEnsemble& ens,
                                 double t_hat = kComplexTHat);

/// build_complex on the extended ensemble [Phi, dither / rho]; (m+1) x (2n+2).
ReformulatedSystem build_dithered(const PhaseObservation& obs, const DitheredEnsemble& dens,
                                  double t_hat = kComplexTHat);

/// Operator form of the low-rank reformulation acting on U = [U_re; U_im].
LowRankSystem build_lowrank(const PhaseObservation& obs, const LowRankMap& map,
                            double t_hat = kComplexTHat);

/// max_k |z_k - phase(Phi_k^* xhat)| over entries with z_k != 0.
double residual_phase_consistency(const SensingEnsemble& ens, const PhaseObservation& obs,
                                  const ComplexVector& xhat);

/// kappa m / ||Phi x||_1 * x, the scaled truth that the noiseless reformulation maps to e1.
ComplexVector rescaled_truth(const SensingEnsemble& ens, const ComplexVector& x);
ComplexMatrix rescaled_truth(const LowRankMap& map, const ComplexMatrix& x);

}  // namespace pocs
