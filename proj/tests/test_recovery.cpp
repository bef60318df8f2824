#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pocs/recovery.hpp"

using namespace pocs;

TEST_CASE("direction error") {
  Rng rng(1);
  const ComplexVector x = gen_sparse_signal(6, 3, Field::complex, rng);
  CHECK(direction_error(ComplexVector(5.0 * x), x) <= 1e-15);
  CHECK(std::abs(direction_error(ComplexVector(-x), x) - 2.0) <= 1e-15);
  CHECK(std::abs(direction_error(ComplexVector(Complex{0, 1} * x), x) - std::sqrt(2.0)) <= 1e-15);
  CHECK(direction_error(ComplexVector::Zero(6), x) == 1.0);

  const ComplexMatrix xm = gen_lowrank_signal(3, 3, 1, rng);
  CHECK(direction_error(ComplexMatrix(2.0 * xm), xm) <= 1e-15);
  CHECK(direction_error(ComplexMatrix::Zero(3, 3), xm) == 1.0);
}

TEST_CASE("sparse recovery of a single unknown") {
  Rng rng(2);
  const SensingEnsemble ens = draw_ensemble(3, 1, rng);
  const ComplexVector x = gen_sparse_signal(1, 1, Field::complex, rng);
  const SparseOutcome out = recover_sparse(ens, measure_phases(ens, x), Field::complex, {}, x);
  CHECK(out.direction_error < 1e-8);
  CHECK(out.success);
}

TEST_CASE("sparse recovery agrees with the brute-force oracle") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const SensingEnsemble ens = draw_ensemble(12, 8, rng);
    const ComplexVector x = gen_sparse_signal(8, 1, Field::complex, rng);
    const PhaseObservation obs = measure_phases(ens, x);
    const SparseOutcome out = recover_sparse(ens, obs, Field::complex, {}, x);
    const ReformulatedSystem sys = build_complex(obs, ens);
    const auto o = oracle::support_enumeration_bp(sys.a, sys.rhs(), 2);
    REQUIRE(o.has_value());
    const ComplexVector xo = unembed_vector(*o);
    CHECK((out.xhat / out.xhat.norm() - xo / xo.norm()).norm() <= 1e-5);
  }
}

TEST_CASE("real-field sparse recovery") {
  Rng rng(4);
  int ok = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const SensingEnsemble ens = draw_ensemble(40, 40, rng);
    const ComplexVector x = gen_sparse_signal(40, 3, Field::real, rng);
    const SparseOutcome out = recover_sparse(ens, measure_phases(ens, x), Field::real, {}, x);
    CHECK(out.xhat.imag().cwiseAbs().maxCoeff() == 0.0);
    ok += out.success;
  }
  CHECK(ok >= 18);
}

TEST_CASE("success flag follows the threshold exactly") {
  Rng rng(5);
  const SensingEnsemble ens = draw_ensemble(10, 20, rng);
  const ComplexVector x = gen_sparse_signal(20, 3, Field::complex, rng);
  const PhaseObservation obs = measure_phases(ens, x);
  const SparseOutcome strict = recover_sparse(ens, obs, Field::complex, {}, x);
  CHECK(strict.success == (strict.direction_error < kSuccessThreshold));
  const SparseOutcome loose = recover_sparse(ens, obs, Field::complex, {}, x, 2.01);
  CHECK(loose.success);
  const SparseOutcome blind = recover_sparse(ens, obs, Field::complex);
  CHECK(std::isnan(blind.direction_error));
  CHECK_FALSE(blind.success);
}

TEST_CASE("pipeline is invariant to positive scaling of the signal") {
  Rng rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const SensingEnsemble ens = draw_ensemble(36, 80, rng);
    const ComplexVector x = gen_sparse_signal(80, 3, Field::complex, rng);
    const SparseOutcome a = recover_sparse(ens, measure_phases(ens, x), Field::complex);
    const SparseOutcome b = recover_sparse(ens, measure_phases(ens, 17.0 * x), Field::complex);
    const SparseOutcome c = recover_sparse(ens, measure_phases(ens, 8.0 * x), Field::complex);
    CHECK((a.xhat - b.xhat).norm() <= 1e-9 * a.xhat.norm());
    CHECK(a.xhat == c.xhat);
  }
}

TEST_CASE("successful recoveries are phase consistent") {
  Rng rng(7);
  int successes = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const SensingEnsemble ens = draw_ensemble(36, 80, rng);
    const ComplexVector x = gen_sparse_signal(80, 3, Field::complex, rng);
    const PhaseObservation obs = measure_phases(ens, x);
    const SparseOutcome out = recover_sparse(ens, obs, Field::complex, {}, x);
    if (out.direction_error < 1e-3) {
      ++successes;
      CHECK(residual_phase_consistency(ens, obs, out.xhat) < 1e-6);
    }
  }
  CHECK(successes >= 18);
}

TEST_CASE("linear compressive sensing") {
  Rng rng(8);
  const SensingEnsemble square = draw_ensemble(16, 8, rng);
  const ComplexVector x = gen_sparse_signal(8, 3, Field::complex, rng);
  const SparseOutcome det = recover_linear_cs(square, square.phi * x, {}, x);
  CHECK(*det.full_error <= 1e-8);

  const SensingEnsemble ens = draw_ensemble(21, 80, rng);
  const ComplexVector x2 = gen_sparse_signal(80, 3, Field::complex, rng);
  const ComplexVector y = ens.phi * x2;
  const SparseOutcome out = recover_linear_cs(ens, y, {}, x2);
  CHECK((ens.phi * out.xhat - y).norm() <= 1e-6);
  CHECK(out.success == (*out.full_error < kSuccessThreshold));
  CHECK_THROWS_AS(recover_linear_cs(ens, ComplexVector::Zero(5)), DimensionError);
}

TEST_CASE("dithered recovery restores the norm") {
  Rng rng(9);
  int ok = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const DitheredEnsemble d = draw_dithered_ensemble(48, 80, 1.0 / 3.0, rng);
    const ComplexVector x = gen_sparse_signal(80, 3, Field::complex, rng);
    const SparseOutcome out = recover_full_dithered(d, measure_phases_dithered(d, x), {}, x);
    REQUIRE(out.full_error.has_value());
    REQUIRE(out.scale_residue.has_value());
    if (out.success) {
      ++ok;
      CHECK(std::abs(out.xhat.norm() - 1.0) < 1e-3);
      CHECK(*out.scale_residue < 1e-6);
    }
  }
  CHECK(ok >= 8);
}

TEST_CASE("zero dither cannot encode the norm") {
  Rng rng(10);
  DitheredEnsemble d = draw_dithered_ensemble(20, 10, 1.0 / 3.0, rng);
  d.dither.setZero();
  const ComplexVector x = gen_sparse_signal(10, 2, Field::complex, rng);
  const SparseOutcome out = recover_full_dithered(d, measure_phases_dithered(d, x), {}, x);
  CHECK(out.flag == OutcomeFlag::degenerate_scale);
  CHECK_FALSE(out.success);
}

TEST_CASE("noisy recovery at zero noise matches noiseless recovery") {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const SensingEnsemble ens = draw_ensemble(48, 80, rng);
    const ComplexVector x = gen_sparse_signal(80, 3, Field::complex, rng);
    const PhaseObservation obs = measure_phases(ens, x);
    const SparseOutcome clean = recover_sparse(ens, obs, Field::complex, {}, x);
    const PhaseObservation noisy_obs = corrupt_phases(obs, 0.0, NoiseModel::disk, rng);
    const SparseOutcome noisy = recover_noisy(ens, noisy_obs, 0.0, {}, x);
    CHECK(std::abs(clean.direction_error - noisy.direction_error) <= 1e-6);
    CHECK((clean.xhat - noisy.xhat).norm() <= 1e-6);
  }
}

TEST_CASE("noisy recovery error is bounded by the noise level") {
  Rng rng(12);
  const double tau0 = 0.05;
  int within = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const SensingEnsemble ens = draw_ensemble(48, 80, rng);
    const ComplexVector x = gen_sparse_signal(80, 3, Field::complex, rng);
    const PhaseObservation obs = corrupt_phases(measure_phases(ens, x), tau0, NoiseModel::disk, rng);
    const SparseOutcome out = recover_noisy(ens, obs, tau0, {}, x);
    REQUIRE(out.full_error.has_value());
    within += *out.full_error <= 10 * tau0;
  }
  CHECK(within >= 9);
}

TEST_CASE("low-rank recovery") {
  Rng rng(13);
  const int n1 = 4, n2 = 4;
  // overdetermined reformulation pins the solution
  const LowRankMap big = draw_lowrank_map(2 * n1 * n2, n1, n2, rng);
  const ComplexMatrix x = gen_lowrank_signal(n1, n2, 1, rng);
  const LowRankOutcome exact = recover_lowrank(big, measure_lowrank_phases(big, x), {}, x);
  CHECK(exact.direction_error < 1e-6);

  const LowRankMap map = draw_lowrank_map(40, n1, n2, rng);
  const LowRankOutcome out = recover_lowrank(map, measure_lowrank_phases(map, x), {}, x);
  CHECK(out.success);
  const auto s = Eigen::JacobiSVD<ComplexMatrix>(out.xhat).singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) rank += s[i] > 1e-6;
  CHECK(rank <= 2);
}
