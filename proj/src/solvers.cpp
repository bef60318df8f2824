#include "pocs/solvers.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <vector>

namespace pocs {

void SolverOptions::validate() const {
  if (!(penalty > 0.0) || !std::isfinite(penalty)) throw ParameterError("solver penalty must be positive");
  if (!(over_relax >= 1.0 && over_relax <= 1.8)) throw ParameterError("over_relax must lie in [1, 1.8]");
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw ParameterError("solver tolerances must be positive");
  if (max_iter < 1) throw ParameterError("max_iter must be >= 1");
}

std::string to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::converged: return "converged";
    case SolverStatus::max_iter: return "max-iter";
    case SolverStatus::infeasible: return "infeasible";
    case SolverStatus::numerical_error: return "numerical-error";
  }
  return "unknown";
}

template <class Solution>
std::string to_csv_record(const SolveReport<Solution>& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g", to_string(r.status).c_str(), r.iterations,
                r.primal_residual, r.dual_residual);
  return buf;
}

template std::string to_csv_record(const SolveReport<RealVector>&);
template std::string to_csv_record(const SolveReport<RealMatrix>&);

RealVector soft_threshold(const RealVector& v, double threshold) {
  if (threshold < 0.0) throw ParameterError("soft_threshold: negative threshold");
  RealVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]) - threshold;
    out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
  }
  return out;
}

RealMatrix singular_value_threshold(const RealMatrix& m, double threshold) {
  if (threshold < 0.0) throw ParameterError("singular_value_threshold: negative threshold");
  if (m.size() == 0) return m;
  Eigen::JacobiSVD<RealMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  if (!s.allFinite()) throw NumericalError("singular_value_threshold: SVD produced non-finite values");
  Eigen::Index keep = 0;
  while (keep < s.size() && s[keep] > threshold) ++keep;
  if (keep == 0) return RealMatrix::Zero(m.rows(), m.cols());
  const RealVector shrunk = s.head(keep).array() - threshold;
  return svd.matrixU().leftCols(keep) * shrunk.asDiagonal() * svd.matrixV().leftCols(keep).transpose();
}

namespace {

bool all_finite(const RealMatrix& a, const RealVector& b) { return a.allFinite() && b.allFinite(); }

/// Applies the pseudo-inverse of a Gram matrix g = a a^T. A Cholesky factor is
/// used when g is well conditioned; otherwise (redundant or overdetermined
/// rows) an eigendecomposition restricted to the numerical range of g.
class GramSolver {
 public:
  explicit GramSolver(const RealMatrix& gram) {
    if (gram.rows() == 0) return;
    Eigen::LLT<RealMatrix> llt(gram);
    if (llt.info() == Eigen::Success) {
      const RealVector d = RealMatrix(llt.matrixL()).diagonal();
      if (d.minCoeff() > 1e-7 * d.maxCoeff()) {
        llt_ = std::move(llt);
        return;
      }
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> eig(gram);
    if (eig.info() != Eigen::Success) throw NumericalError("Gram eigendecomposition failed");
    const RealVector& lam = eig.eigenvalues();
    const double top = lam.cwiseAbs().maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < lam.size(); ++i)
      if (lam[i] > 1e-10 * top) keep.push_back(i);
    basis_.resize(gram.rows(), static_cast<Eigen::Index>(keep.size()));
    inv_.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
      basis_.col(static_cast<Eigen::Index>(j)) = eig.eigenvectors().col(keep[j]);
      inv_[static_cast<Eigen::Index>(j)] = 1.0 / lam[keep[j]];
    }
  }

  RealVector solve(const RealVector& r) const {
    if (llt_) return llt_->solve(r);
    return basis_ * inv_.cwiseProduct(basis_.transpose() * r);
  }

  /// Whether b lies in the range of the Gram matrix (so a u = b is solvable).
  bool consistent(const RealVector& b) const {
    if (llt_) return true;
    const RealVector miss = b - basis_ * (basis_.transpose() * b);
    return miss.norm() <= 1e-8 * std::max(1.0, b.norm());
  }

 private:
  std::optional<Eigen::LLT<RealMatrix>> llt_;
  RealMatrix basis_;
  RealVector inv_;
};

/// Exact solve on the support of z. Accepted only if the result is feasible,
/// keeps the sign pattern of z and stays close to it.
std::optional<RealVector> polish_on_support(const RealMatrix& a, const RealVector& b, const RealVector& z) {
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (z[i] != 0.0) support.push_back(i);
  const double b_norm = b.norm();
  if (support.empty()) {
    if (b_norm == 0.0) return RealVector::Zero(z.size());
    return std::nullopt;
  }
  if (static_cast<Eigen::Index>(support.size()) > a.rows()) return std::nullopt;

  RealMatrix sub(a.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = a.col(support[j]);
  Eigen::ColPivHouseholderQR<RealMatrix> qr(sub);
  if (qr.rank() < sub.cols()) return std::nullopt;
  const RealVector w = qr.solve(b);
  if ((sub * w - b).norm() > 1e-10 * std::max(1.0, b_norm)) return std::nullopt;

  RealVector out = RealVector::Zero(z.size());
  double drift = 0.0;
  for (std::size_t j = 0; j < support.size(); ++j) {
    const auto i = support[j];
    if (w[static_cast<Eigen::Index>(j)] * z[i] <= 0.0) return std::nullopt;
    out[i] = w[static_cast<Eigen::Index>(j)];
    drift = std::max(drift, std::abs(out[i] - z[i]));
  }
  if (drift > 1e-3 * std::max(1.0, z.norm())) return std::nullopt;
  return out;
}

struct L1AdmmResult {
  RecoveryReport report;  // solution holds the projected (feasible) iterate
  RealVector sparse;      // the soft-thresholded iterate
};

/// Shared ADMM loop for the l1 problems; `project(v, out)` is the u-step and
/// returns false if it could not be computed.
template <class Project>
L1AdmmResult l1_admm(Eigen::Index q, const SolverOptions& opts, Project&& project) {
  RecoveryReport rep;
  RealVector x = RealVector::Zero(q);
  RealVector z = RealVector::Zero(q);
  RealVector u = RealVector::Zero(q);
  RealVector z_old(q);
  RealVector x_hat(q);
  const double sqrt_q = std::sqrt(static_cast<double>(q));
  const double alpha = opts.over_relax;
  const double shrink = 1.0 / opts.penalty;

  rep.status = SolverStatus::max_iter;
  for (int it = 1; it <= opts.max_iter; ++it) {
    rep.iterations = it;
    if (!project(RealVector(z - u), x)) {
      rep.status = SolverStatus::max_iter;
      break;
    }
    z_old = z;
    x_hat = alpha * x + (1.0 - alpha) * z_old;
    z = soft_threshold(x_hat + u, shrink);
    u += x_hat - z;

    rep.primal_residual = (x - z).norm();
    rep.dual_residual = opts.penalty * (z - z_old).norm();
    if (!x.allFinite() || !z.allFinite()) {
      rep.status = SolverStatus::numerical_error;
      break;
    }
    const double eps_pri = sqrt_q * opts.abs_tol + opts.rel_tol * std::max(x.norm(), z.norm());
    const double eps_dual = sqrt_q * opts.abs_tol + opts.rel_tol * opts.penalty * u.norm();
    if (rep.primal_residual < eps_pri && rep.dual_residual < eps_dual) {
      rep.status = SolverStatus::converged;
      break;
    }
  }
  rep.solution = std::move(x);
  return {std::move(rep), std::move(z)};
}

void finish_with_polish(L1AdmmResult& res, const RealMatrix& a, const RealVector& b) {
  if (res.report.status != SolverStatus::converged) return;
  if (auto polished = polish_on_support(a, b, res.sparse)) {
    res.report.solution = std::move(*polished);
    res.report.polished = true;
  }
}

}  // namespace

RecoveryReport basis_pursuit(const RealMatrix& a, const RealVector& b, const SolverOptions& opts) {
  opts.validate();
  if (a.rows() != b.size()) throw DimensionError("basis_pursuit: rows of a != length of b");
  if (!all_finite(a, b)) throw ParameterError("basis_pursuit: non-finite input");
  const Eigen::Index q = a.cols();

  const GramSolver gram(a * a.transpose());
  if (!gram.consistent(b)) {
    RecoveryReport rep;
    rep.solution = RealVector::Zero(q);
    rep.status = SolverStatus::infeasible;
    return rep;
  }

  auto project = [&](const RealVector& v, RealVector& out) {
    out = v - a.transpose() * gram.solve(a * v - b);
    return true;
  };
  auto res = l1_admm(q, opts, project);
  finish_with_polish(res, a, b);
  return std::move(res.report);
}

BallProjector::BallProjector(const RealMatrix& a, const RealVector& b, double epsilon)
    : epsilon_(epsilon), b_norm_(b.norm()) {
  if (epsilon < 0.0 || !std::isfinite(epsilon)) throw ParameterError("ball projection: epsilon must be >= 0");
  if (a.rows() != b.size()) throw DimensionError("ball projection: rows of a != length of b");
  Eigen::BDCSVD<RealMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  if (!s.allFinite()) throw NumericalError("ball projection: SVD failed");
  const double cutoff = s.size() > 0 ? s[0] * 1e-13 * static_cast<double>(std::max(a.rows(), a.cols())) : 0.0;
  Eigen::Index r = 0;
  while (r < s.size() && s[r] > cutoff) ++r;
  v_ = svd.matrixV().leftCols(r);
  sigma_ = s.head(r);
  const RealMatrix u = svd.matrixU().leftCols(r);
  c_ = u.transpose() * b;
  constant_ = (b - u * c_).squaredNorm();
  min_residual_ = std::sqrt(constant_);
}

BallProjector::Result BallProjector::project(const RealVector& v) const {
  const RealVector g = v_.transpose() * v;
  const RealVector miss = sigma_.cwiseProduct(g) - c_;  // residual along each singular direction
  const double resid0 = std::sqrt(miss.squaredNorm() + constant_);
  Result res;
  if (resid0 <= epsilon_) {
    res.point = v;
    return res;
  }
  if (!feasible()) {
    res.point = v;
    res.converged = false;
    return res;
  }

  const RealVector s2 = sigma_.cwiseAbs2();
  auto residual = [&](double lambda) {
    return std::sqrt((miss.array() / (1.0 + lambda * s2.array())).square().sum() + constant_);
  };
  auto target = [&](const RealVector& w) {
    res.point = v + v_ * (w - g);
  };

  if (epsilon_ <= std::sqrt(constant_) * (1.0 + 1e-12) || epsilon_ == 0.0) {
    // Limit lambda -> infinity: the affine least-squares projection.
    const RealVector w = g - (miss.array() / sigma_.array()).matrix();
    target(w);
    res.multiplier = std::numeric_limits<double>::infinity();
    return res;
  }

  // h(lambda) = ||a u(lambda) - b|| - epsilon is convex and decreasing.
  double lo = 0.0;
  double hi = 1.0;
  for (int guard = 0; residual(hi) > epsilon_; ++guard) {
    if (guard > 2000) {
      res.point = v;
      res.converged = false;
      return res;
    }
    lo = hi;
    hi *= 2.0;
  }
  const double tol = 1e-12 * std::max(1.0, epsilon_);
  double lambda = lo;
  res.converged = false;
  for (int it = 0; it < 500; ++it) {
    const Eigen::ArrayXd denom = 1.0 + lambda * s2.array();
    const double sq = (miss.array() / denom).square().sum() + constant_;
    const double r = std::sqrt(sq);
    const double h = r - epsilon_;
    if (std::abs(h) <= tol) {
      res.converged = true;
      break;
    }
    (h > 0.0 ? lo : hi) = lambda;
    const double dsq = (-2.0 * s2.array() * miss.array().square() / denom.cube()).sum();
    const double dh = dsq / (2.0 * r);
    double next = dh < 0.0 ? lambda - h / dh : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-15 * hi) {
      res.converged = std::abs(h) <= 1e-9 * std::max(1.0, epsilon_);
      break;
    }
    lambda = next;
  }
  res.multiplier = lambda;
  const RealVector w = ((g.array() + lambda * sigma_.array() * c_.array()) / (1.0 + lambda * s2.array())).matrix();
  target(w);
  return res;
}

RecoveryReport basis_pursuit_denoise(const RealMatrix& a, const RealVector& b, double epsilon,
                                     const SolverOptions& opts) {
  opts.validate();
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ParameterError("basis_pursuit_denoise: epsilon must be >= 0");
  if (a.rows() != b.size()) throw DimensionError("basis_pursuit_denoise: rows of a != length of b");
  if (!all_finite(a, b)) throw ParameterError("basis_pursuit_denoise: non-finite input");
  const Eigen::Index q = a.cols();

  const BallProjector projector(a, b, epsilon);
  if (!projector.feasible()) {
    RecoveryReport rep;
    rep.solution = RealVector::Zero(q);
    rep.primal_residual = projector.min_residual();
    rep.status = SolverStatus::infeasible;
    return rep;
  }
  auto project = [&](const RealVector& v, RealVector& out) {
    auto res = projector.project(v);
    out = std::move(res.point);
    return res.converged;
  };
  auto res = l1_admm(q, opts, project);
  if (epsilon == 0.0) finish_with_polish(res, a, b);
  return std::move(res.report);
}

MatrixRecoveryReport nuclear_min(const LowRankSystem& sys, const SolverOptions& opts) {
  opts.validate();
  if (!sys.forward || !sys.adjoint) throw ParameterError("nuclear_min: system has no operator");
  const Eigen::Index p = sys.out_dim;
  if (sys.rhs.size() != p) throw DimensionError("nuclear_min: rhs length != output dimension");
  if (!sys.rhs.allFinite()) throw ParameterError("nuclear_min: non-finite rhs");

  MatrixRecoveryReport rep;
  RealMatrix gram(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    gram.col(j) = sys.forward(sys.adjoint(RealVector::Unit(p, j)));
  }
  gram = 0.5 * (gram + gram.transpose());
  const GramSolver solver(gram);
  if (p == 0 || !solver.consistent(sys.rhs)) {
    rep.solution = RealMatrix::Zero(sys.rows, sys.cols);
    rep.status = SolverStatus::infeasible;
    return rep;
  }

  const double sqrt_dim = std::sqrt(static_cast<double>(sys.rows * sys.cols));
  const double alpha = opts.over_relax;
  const double shrink = 1.0 / opts.penalty;
  RealMatrix x = RealMatrix::Zero(sys.rows, sys.cols);
  RealMatrix z = x;
  RealMatrix u = x;
  RealMatrix z_old;
  rep.status = SolverStatus::max_iter;
  try {
    for (int it = 1; it <= opts.max_iter; ++it) {
      rep.iterations = it;
      const RealMatrix w = z - u;
      x = w - sys.adjoint(solver.solve(sys.forward(w) - sys.rhs));
      z_old = z;
      const RealMatrix x_hat = alpha * x + (1.0 - alpha) * z_old;
      z = singular_value_threshold(x_hat + u, shrink);
      u += x_hat - z;

      rep.primal_residual = (x - z).norm();
      rep.dual_residual = opts.penalty * (z - z_old).norm();
      if (!x.allFinite() || !z.allFinite()) {
        rep.status = SolverStatus::numerical_error;
        break;
      }
      const double eps_pri = sqrt_dim * opts.abs_tol + opts.rel_tol * std::max(x.norm(), z.norm());
      const double eps_dual = sqrt_dim * opts.abs_tol + opts.rel_tol * opts.penalty * u.norm();
      if (rep.primal_residual < eps_pri && rep.dual_residual < eps_dual) {
        rep.status = SolverStatus::converged;
        break;
      }
    }
  } catch (const NumericalError&) {
    rep.status = SolverStatus::numerical_error;
  }
  rep.solution = std::move(z);
  return rep;
}

}  // namespace pocs
