#pragma once

#include <vector>

#include "pocs/linalg.hpp"

namespace pocs {

enum class Field { real, complex };

/// Rows of phi are the sensing vectors Phi_k^*, so measurements read phi * x.
struct SensingEnsemble {
  ComplexMatrix phi;

  int m() const { return static_cast<int>(phi.rows()); }
  int n() const { return static_cast<int>(phi.cols()); }
};

/// Ensemble plus a known complex Gaussian dither of scale rho.
struct DitheredEnsemble {
  SensingEnsemble base;
  ComplexVector dither;
  double rho = 1.0 / 3.0;

  /// [phi, dither / rho], the m x (n+1) ensemble that absorbs the dither as
  /// an extra coordinate of known value rho.
  SensingEnsemble extended() const;
};

/// A linear map C^{n1 x n2} -> C^m, U -> (<Phi_k, U>)_k with <A, B> = Tr(A^* B).
struct LowRankMap {
  std::vector<ComplexMatrix> atoms;

  int m() const { return static_cast<int>(atoms.size()); }
  int n1() const { return atoms.empty() ? 0 : static_cast<int>(atoms.front().rows()); }
  int n2() const { return atoms.empty() ? 0 : static_cast<int>(atoms.front().cols()); }

  ComplexVector apply(const ComplexMatrix& u) const;
};

struct PhaseObservation {
  ComplexVector z;
  bool corrupted = false;
  double noise_bound = 0.0;
};

enum class NoiseModel { disk, phase_jitter };

SensingEnsemble draw_ensemble(int m, int n, Rng& rng);

/// Dither entries are N(0, rho^2) + N(0, rho^2)i.
DitheredEnsemble draw_dithered_ensemble(int m, int n, double rho, Rng& rng);

/// m i.i.d. atoms with N(0,1) + N(0,1)i entries.
LowRankMap draw_lowrank_map(int m, int n1, int n2, Rng& rng);

/// Unit-norm s-sparse vector. The support is uniform over all size-s subsets
/// (partial Fisher-Yates); nonzeros are N(0,1), plus N(0,1)i for the complex field.
ComplexVector gen_sparse_signal(int n, int s, Field field, Rng& rng);

/// Rank-r n1 x n2 matrix G H^* with Gaussian factors, scaled to unit Frobenius norm.
ComplexMatrix gen_lowrank_signal(int n1, int n2, int r, Rng& rng);

PhaseObservation measure_phases(const SensingEnsemble& ens, const ComplexVector& x);

PhaseObservation measure_phases_dithered(const DitheredEnsemble& dens, const ComplexVector& x);

/// Bounded corruption with ||z_out - z||_inf <= tau0.
///
/// disk: adds tau_k uniform on the complex disk of radius tau0.
/// phase_jitter: rotates z_k by theta_k uniform on [-2 asin(tau0/2), 2 asin(tau0/2)]
/// (capped at pi), which keeps |z_k| = 1.
PhaseObservation corrupt_phases(const PhaseObservation& obs, double tau0, NoiseModel model, Rng& rng);

PhaseObservation measure_lowrank_phases(const LowRankMap& map, const ComplexMatrix& x);

}  // namespace pocs
