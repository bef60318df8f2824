#include "pocs/sensing.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace pocs {

SensingEnsemble DitheredEnsemble::extended() const {
  if (dither.size() != base.phi.rows()) {
    throw DimensionError("dithered ensemble: dither length does not match m");
  }
  SensingEnsemble out;
  out.phi.resize(base.m(), base.n() + 1);
  out.phi.leftCols(base.n()) = base.phi;
  out.phi.col(base.n()) = dither / rho;
  return out;
}

ComplexVector LowRankMap::apply(const ComplexMatrix& u) const {
  ComplexVector out(m());
  for (int k = 0; k < m(); ++k) {
    if (atoms[k].rows() != u.rows() || atoms[k].cols() != u.cols()) {
      throw DimensionError("low-rank map: matrix shape does not match atom shape");
    }
    // Tr(Phi_k^* U) = sum_ij conj(Phi_k(i,j)) U(i,j)
    out[k] = (atoms[k].conjugate().cwiseProduct(u)).sum();
  }
  return out;
}

SensingEnsemble draw_ensemble(int m, int n, Rng& rng) { return {sample_complex_gaussian(m, n, rng)}; }

DitheredEnsemble draw_dithered_ensemble(int m, int n, double rho, Rng& rng) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ParameterError("dither scale rho must be finite and positive");
  DitheredEnsemble out;
  out.base = draw_ensemble(m, n, rng);
  out.dither = rho * sample_complex_gaussian(m, 1, rng).col(0);
  out.rho = rho;
  return out;
}

LowRankMap draw_lowrank_map(int m, int n1, int n2, Rng& rng) {
  if (m < 1) throw ParameterError("low-rank map needs m >= 1");
  LowRankMap out;
  out.atoms.reserve(m);
  for (int k = 0; k < m; ++k) out.atoms.push_back(sample_complex_gaussian(n1, n2, rng));
  return out;
}

ComplexVector gen_sparse_signal(int n, int s, Field field, Rng& rng) {
  if (n < 1 || s < 1 || s > n) {
    throw ParameterError("gen_sparse_signal: need 1 <= s <= n, got n=" + std::to_string(n) +
                         " s=" + std::to_string(s));
  }
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < s; ++i) {
    const auto j = i + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[i], idx[j]);
  }
  ComplexVector x = ComplexVector::Zero(n);
  for (int i = 0; i < s; ++i) {
    Complex v;
    // A zero draw has probability zero but would break the sparsity count.
    do {
      v = field == Field::complex ? rng.complex_normal() : Complex{rng.normal(), 0.0};
    } while (v == Complex{0.0, 0.0});
    x[idx[i]] = v;
  }
  x /= x.norm();
  return x;
}

ComplexMatrix gen_lowrank_signal(int n1, int n2, int r, Rng& rng) {
  if (n1 < 1 || n2 < 1 || r < 1 || r > std::min(n1, n2)) {
    throw ParameterError("gen_lowrank_signal: need 1 <= r <= min(n1, n2)");
  }
  const ComplexMatrix g = sample_complex_gaussian(n1, r, rng);
  const ComplexMatrix h = sample_complex_gaussian(n2, r, rng);
  ComplexMatrix x = g * h.adjoint();
  x /= x.norm();
  return x;
}

PhaseObservation measure_phases(const SensingEnsemble& ens, const ComplexVector& x) {
  if (x.size() != ens.n()) {
    throw DimensionError("measure_phases: signal length " + std::to_string(x.size()) + " != n " +
                         std::to_string(ens.n()));
  }
  return {phase(ComplexVector(ens.phi * x)), false, 0.0};
}

PhaseObservation measure_phases_dithered(const DitheredEnsemble& dens, const ComplexVector& x) {
  if (x.size() != dens.base.n()) throw DimensionError("measure_phases_dithered: signal length != n");
  if (dens.dither.size() != dens.base.m()) throw DimensionError("measure_phases_dithered: dither length != m");
  return {phase(ComplexVector(dens.base.phi * x + dens.dither)), false, 0.0};
}

PhaseObservation corrupt_phases(const PhaseObservation& obs, double tau0, NoiseModel model, Rng& rng) {
  if (!(tau0 >= 0.0) || !std::isfinite(tau0)) throw ParameterError("corrupt_phases: tau0 must be >= 0");
  if (obs.corrupted) throw ParameterError("corrupt_phases: observation is already corrupted");
  PhaseObservation out{obs.z, true, tau0};
  if (tau0 == 0.0) return out;
  const double max_angle = tau0 >= 2.0 ? std::numbers::pi : 2.0 * std::asin(tau0 / 2.0);
  for (Eigen::Index k = 0; k < out.z.size(); ++k) {
    if (model == NoiseModel::disk) {
      const double radius = tau0 * std::sqrt(rng.uniform());
      const double angle = 2.0 * std::numbers::pi * rng.uniform();
      out.z[k] += std::polar(radius, angle);
    } else {
      const double theta = max_angle * (2.0 * rng.uniform() - 1.0);
      out.z[k] *= std::polar(1.0, theta);
    }
  }
  return out;
}

PhaseObservation measure_lowrank_phases(const LowRankMap& map, const ComplexMatrix& x) {
  if (map.m() < 1) throw DimensionError("measure_lowrank_phases: empty map");
  if (x.rows() != map.n1() || x.cols() != map.n2()) {
    throw DimensionError("measure_lowrank_phases: matrix shape does not match atom shape");
  }
  return {phase(map.apply(x)), false, 0.0};
}

}  // namespace pocs
