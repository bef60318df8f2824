#include "pocs/reformulation.hpp"

#include <cmath>
#include <memory>
#include <vector>

namespace pocs {

std::string to_string(SystemCase c) {
  switch (c) {
    case SystemCase::real_sparse: return "real-sparse";
    case SystemCase::complex_sparse: return "complex-sparse";
    case SystemCase::dithered: return "dithered";
    case SystemCase::lowrank: return "lowrank";
  }
  return "unknown";
}

SystemCase system_case_from_string(const std::string& tag) {
  if (tag == "real-sparse") return SystemCase::real_sparse;
  if (tag == "complex-sparse") return SystemCase::complex_sparse;
  if (tag == "dithered") return SystemCase::dithered;
  if (tag == "lowrank") return SystemCase::lowrank;
  throw ParameterError("unknown system case '" + tag + "'");
}

RealVector ReformulatedSystem::rhs() const {
  RealVector e1 = RealVector::Zero(m + 1);
  e1[0] = 1.0;
  return e1;
}

namespace {

void check_observation(const PhaseObservation& obs, const SensingEnsemble& ens, const char* who) {
  if (obs.z.size() != ens.m()) {
    throw DimensionError(std::string(who) + ": observation length " + std::to_string(obs.z.size()) +
                         " != m " + std::to_string(ens.m()));
  }
  if (ens.m() < 1 || ens.n() < 1) throw DimensionError(std::string(who) + ": empty ensemble");
}

}  // namespace

ReformulatedSystem build_real(const PhaseObservation& obs, const SensingEnsemble& ens, double t_hat) {
  check_observation(obs, ens, "build_real");
  const int m = ens.m();
  const int n = ens.n();
  const double k = kappa();
  // diag(conj z) Phi
  const ComplexMatrix rotated = obs.z.conjugate().asDiagonal() * ens.phi;

  ReformulatedSystem sys;
  sys.a.resize(m + 1, n);
  sys.a.row(0) = rotated.colwise().sum().real() / (k * m);
  sys.a.bottomRows(m) = rotated.imag() * (t_hat / std::sqrt(static_cast<double>(m)));
  sys.t_hat = t_hat;
  sys.kappa = k;
  sys.kind = SystemCase::real_sparse;
  sys.m = m;
  sys.n = n;
  return sys;
}

ReformulatedSystem build_complex(const PhaseObservation& obs, const SensingEnsemble& ens, double t_hat) {
  check_observation(obs, ens, "build_complex");
  const int m = ens.m();
  const int n = ens.n();
  const double k = kappa();
  const ComplexMatrix rotated = obs.z.conjugate().asDiagonal() * ens.phi;
  const Eigen::RowVectorXcd first = rotated.colwise().sum();  // z^* Phi
  const double row_scale = t_hat / std::sqrt(static_cast<double>(m));

  ReformulatedSystem sys;
  sys.a.resize(m + 1, 2 * n);
  sys.a.block(0, 0, 1, n) = first.real() / (k * m);
  sys.a.block(0, n, 1, n) = -first.imag() / (k * m);
  sys.a.block(1, 0, m, n) = rotated.imag() * row_scale;
  sys.a.block(1, n, m, n) = rotated.real() * row_scale;
  sys.t_hat = t_hat;
  sys.kappa = k;
  sys.kind = SystemCase::complex_sparse;
  sys.m = m;
  sys.n = n;
  return sys;
}

ReformulatedSystem build_dithered(const PhaseObservation& obs, const DitheredEnsemble& dens, double t_hat) {
  auto sys = build_complex(obs, dens.extended(), t_hat);
  sys.kind = SystemCase::dithered;
  return sys;
}

LowRankSystem build_lowrank(const PhaseObservation& obs, const LowRankMap& map, double t_hat) {
  const int m = map.m();
  if (m < 1) throw DimensionError("build_lowrank: empty map");
  if (obs.z.size() != m) throw DimensionError("build_lowrank: observation length != m");
  const int n1 = map.n1();
  const int n2 = map.n2();
  for (const auto& atom : map.atoms) {
    if (atom.rows() != n1 || atom.cols() != n2) throw DimensionError("build_lowrank: atoms differ in shape");
  }
  const double k = kappa();
  const double row_scale = t_hat / std::sqrt(static_cast<double>(m));

  // Row j of the operator is U -> <G_j, U>; the G_j are the only state.
  auto gens = std::make_shared<std::vector<RealMatrix>>();
  gens->reserve(m + 1);
  ComplexMatrix total = ComplexMatrix::Zero(n1, n2);
  std::vector<RealMatrix> phase_rows;
  phase_rows.reserve(m);
  for (int i = 0; i < m; ++i) {
    const ComplexMatrix b = obs.z[i] * map.atoms[i];
    total += b;
    RealMatrix g(2 * n1, n2);
    g.topRows(n1) = -b.imag() * row_scale;
    g.bottomRows(n1) = b.real() * row_scale;
    phase_rows.push_back(std::move(g));
  }
  RealMatrix g0(2 * n1, n2);
  g0.topRows(n1) = total.real() / (k * m);
  g0.bottomRows(n1) = total.imag() / (k * m);
  gens->push_back(std::move(g0));
  for (auto& g : phase_rows) gens->push_back(std::move(g));

  LowRankSystem sys;
  sys.out_dim = m + 1;
  sys.rows = 2 * n1;
  sys.cols = n2;
  sys.rhs = RealVector::Zero(m + 1);
  sys.rhs[0] = 1.0;
  sys.t_hat = t_hat;
  sys.kappa = k;
  sys.forward = [gens, n1, n2](const RealMatrix& u) {
    if (u.rows() != 2 * n1 || u.cols() != n2) throw DimensionError("low-rank forward: shape mismatch");
    RealVector out(static_cast<Eigen::Index>(gens->size()));
    for (std::size_t j = 0; j < gens->size(); ++j) out[j] = (*gens)[j].cwiseProduct(u).sum();
    return out;
  };
  sys.adjoint = [gens, n1, n2](const RealVector& y) {
    if (y.size() != static_cast<Eigen::Index>(gens->size())) {
      throw DimensionError("low-rank adjoint: length mismatch");
    }
    RealMatrix out = RealMatrix::Zero(2 * n1, n2);
    for (std::size_t j = 0; j < gens->size(); ++j) out += y[j] * (*gens)[j];
    return out;
  };
  return sys;
}

double residual_phase_consistency(const SensingEnsemble& ens, const PhaseObservation& obs,
                                  const ComplexVector& xhat) {
  if (xhat.size() != ens.n() || obs.z.size() != ens.m()) {
    throw DimensionError("residual_phase_consistency: dimension mismatch");
  }
  const ComplexVector predicted = ens.phi * xhat;
  double worst = 0.0;
  for (int k = 0; k < ens.m(); ++k) {
    if (obs.z[k] == Complex{0.0, 0.0}) continue;
    worst = std::max(worst, std::abs(obs.z[k] - phase(predicted[k])));
  }
  return worst;
}

ComplexVector rescaled_truth(const SensingEnsemble& ens, const ComplexVector& x) {
  const double l1 = (ens.phi * x).cwiseAbs().sum();
  if (l1 == 0.0) throw NumericalError("rescaled_truth: Phi x vanishes");
  return x * (kappa() * ens.m() / l1);
}

ComplexMatrix rescaled_truth(const LowRankMap& map, const ComplexMatrix& x) {
  const double l1 = map.apply(x).cwiseAbs().sum();
  if (l1 == 0.0) throw NumericalError("rescaled_truth: Phi(X) vanishes");
  return x * (kappa() * map.m() / l1);
}

}  // namespace pocs
