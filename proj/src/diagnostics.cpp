#include "pocs/diagnostics.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numeric>
#include <string>

namespace pocs {

double support_distortion(const RealMatrix& a, std::span<const int> support) {
  RealMatrix sub(a.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = a.col(support[j]);
  const RealMatrix gram = sub.transpose() * sub;
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(gram, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  return std::max(ev.maxCoeff() - 1.0, 1.0 - ev.minCoeff());
}

long long binomial(int q, int k) {
  if (k < 0 || k > q) return 0;
  k = std::min(k, q - k);
  // Each partial product is C(q - k + i, i), so the division is exact.
  __int128 acc = 1;
  for (int i = 1; i <= k; ++i) {
    acc = acc * (q - k + i) / i;
    if (acc > LLONG_MAX) return LLONG_MAX;
  }
  return static_cast<long long>(acc);
}

namespace {

void check_order(const RealMatrix& a, int order) {
  if (order < 1 || order > a.cols()) {
    throw ParameterError("RIC order " + std::to_string(order) + " outside [1, " + std::to_string(a.cols()) + "]");
  }
}

}  // namespace

RicEstimate estimate_ric_exact(const RealMatrix& a, int order, long long cap) {
  check_order(a, order);
  const int q = static_cast<int>(a.cols());
  const long long total = binomial(q, order);
  if (total > cap) {
    throw ParameterError("exact RIC needs " + std::to_string(total) + " supports, over the cap of " +
                         std::to_string(cap) + "; use sampled mode");
  }
  RicEstimate est;
  est.order = order;
  est.mode = RicMode::exact_enumeration;
  est.delta = -1.0;
  Support support(order);
  std::iota(support.begin(), support.end(), 0);
  for (;;) {
    const double d = support_distortion(a, support);
    ++est.samples;
    if (d > est.delta) {
      est.delta = d;
      est.witness = support;
    }
    // next combination in lexicographic order
    int i = order - 1;
    while (i >= 0 && support[i] == q - order + i) --i;
    if (i < 0) break;
    ++support[i];
    for (int j = i + 1; j < order; ++j) support[j] = support[j - 1] + 1;
  }
  est.delta = std::max(est.delta, 0.0);
  return est;
}

RicEstimate estimate_ric_sampled(const RealMatrix& a, int order, long long samples, Rng& rng,
                                 std::span<const Support> candidates) {
  check_order(a, order);
  if (samples < 1) throw ParameterError("sampled RIC needs samples >= 1");
  RicEstimate est;
  est.order = order;
  est.mode = RicMode::sampled;
  est.delta = -1.0;
  auto consider = [&](std::span<const int> s) {
    const double d = support_distortion(a, s);
    ++est.samples;
    if (d > est.delta) {
      est.delta = d;
      est.witness.assign(s.begin(), s.end());
    }
  };
  for (const auto& c : candidates) {
    if (static_cast<int>(c.size()) != order) throw ParameterError("candidate support has the wrong order");
    consider(c);
  }
  const int q = static_cast<int>(a.cols());
  std::vector<int> perm(q);
  std::iota(perm.begin(), perm.end(), 0);
  Support draw(order);
  for (long long t = 0; t < samples; ++t) {
    for (int i = 0; i < order; ++i) {
      const int j = i + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(q - i)));
      std::swap(perm[i], perm[j]);
      draw[i] = perm[i];
    }
    std::sort(draw.begin(), draw.end());
    consider(draw);
  }
  est.delta = std::max(est.delta, 0.0);
  return est;
}

std::vector<Support> signal_adjacent_supports(const ComplexVector& x, int order, int count, Rng& rng) {
  const int n = static_cast<int>(x.size());
  std::vector<int> core;
  for (int j = 0; j < n; ++j) {
    if (x[j] != Complex{0.0, 0.0}) {
      core.push_back(j);
      core.push_back(n + j);
    }
  }
  std::vector<Support> out;
  out.reserve(count);
  for (int c = 0; c < count; ++c) {
    std::vector<int> pool(core);
    // Keep a random part of the core when it is larger than the order.
    for (int i = 0; i < static_cast<int>(pool.size()) && i < order; ++i) {
      const int j = i + static_cast<int>(rng.uniform_index(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    if (static_cast<int>(pool.size()) > order) pool.resize(order);
    std::vector<char> used(2 * n, 0);
    for (int i : pool) used[i] = 1;
    while (static_cast<int>(pool.size()) < order) {
      const int j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(2 * n)));
      if (!used[j]) {
        used[j] = 1;
        pool.push_back(j);
      }
    }
    std::sort(pool.begin(), pool.end());
    out.push_back(std::move(pool));
  }
  return out;
}

RicEstimate estimate_matrix_ric_sampled(const LowRankSystem& sys, int rank, long long samples, Rng& rng) {
  if (rank < 1 || rank > std::min(sys.rows, sys.cols)) throw ParameterError("matrix RIC: rank out of range");
  if (samples < 1) throw ParameterError("matrix RIC needs samples >= 1");
  RicEstimate est;
  est.order = rank;
  est.mode = RicMode::sampled;
  for (long long t = 0; t < samples; ++t) {
    RealMatrix g(sys.rows, rank), h(sys.cols, rank);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng.normal();
    for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = rng.normal();
    RealMatrix u = g * h.transpose();
    u /= u.norm();
    const double d = std::abs(sys.forward(u).squaredNorm() - 1.0);
    est.delta = std::max(est.delta, d);
    ++est.samples;
  }
  return est;
}

namespace {

void require_unit(const ComplexVector& x, const char* who) {
  if (std::abs(x.norm() - 1.0) > 1e-10) throw ParameterError(std::string(who) + ": vector must have unit norm");
}

}  // namespace

int count_near_vanishing(const SensingEnsemble& ens, const ComplexVector& x, double eta) {
  if (!(eta > 0.0)) throw ParameterError("count_near_vanishing: eta must be positive");
  if (x.size() != ens.n()) throw DimensionError("count_near_vanishing: signal length != n");
  require_unit(x, "count_near_vanishing");
  const ComplexVector y = ens.phi * x;
  int count = 0;
  for (Eigen::Index k = 0; k < y.size(); ++k)
    if (std::abs(y[k]) < eta) ++count;
  return count;
}

double l1_concentration(const SensingEnsemble& ens, const ComplexVector& w) {
  if (w.size() != ens.n()) throw DimensionError("l1_concentration: vector length != n");
  require_unit(w, "l1_concentration");
  return std::abs((ens.phi * w).cwiseAbs().sum() / (kappa() * ens.m()) - 1.0);
}

SpeReport spe_deviation(const SensingEnsemble& ens,
                        std::span<const std::pair<ComplexVector, ComplexVector>> pairs) {
  if (pairs.empty()) throw ParameterError("spe_deviation: empty pair list");
  SpeReport rep;
  rep.m = ens.m();
  rep.pair_count = static_cast<int>(pairs.size());
  const double scale = 1.0 / (kappa() * ens.m());
  for (const auto& [u, v] : pairs) {
    if (u.size() != ens.n() || v.size() != ens.n()) throw DimensionError("spe_deviation: vector length != n");
    require_unit(u, "spe_deviation");
    const double nv = v.norm();
    if (nv == 0.0) continue;
    const ComplexVector su = phase(ComplexVector(ens.phi * u));
    const ComplexVector pv = ens.phi * v;
    const double embedded = scale * su.dot(pv).real();  // dot() conjugates its left argument
    const double direct = u.dot(v).real();
    rep.deviation = std::max(rep.deviation, std::abs(embedded - direct) / nv);
  }
  return rep;
}

double estimate_kappa(long long samples, Rng& rng) {
  if (samples < 1) throw ParameterError("estimate_kappa: samples must be >= 1");
  double sum = 0.0;
  for (long long i = 0; i < samples; ++i) sum += std::abs(rng.complex_normal());
  return sum / static_cast<double>(samples);
}

}  // namespace pocs
