#include "ipm/admm.hpp"

#include "ipm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ipm::admm {

namespace {

constexpr double kRhoMin = 1e-6;
constexpr double kRhoMax = 1e6;
constexpr double kTiny = 1e-30;
constexpr double kGapFloor = 1e-12;

// argmin_z max(0, 1 - s z) + rho/2 (z - v)^2, s > 0.
double hinge_prox(double v, double s, double rho) {
  if (s * v >= 1.0) return v;
  const double shifted = v + s / rho;
  if (s * shifted <= 1.0) return shifted;
  return 1.0 / s;
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// Problem after Ruiz equilibration: theta = col_scale .* theta_s, every row of
// H and G multiplied by its row scale. Hinge rows keep their margin through
// hinge_slope = 1 / row scale; the l1 weights become gamma / row scale.
struct Scaled {
  Matrix h;
  Vector h0;
  Vector hinge_slope;
  Matrix g;
  Vector g0;
  Vector l1_weight;
  Vector col_scale;
  Vector quad;
  Vector row_h;
  Vector row_g;
};

Scaled equilibrate(const Problem& p, int passes) {
  const Index n = p.num_params();
  const Index m = p.psd_params();
  Scaled sc;
  sc.h = p.hinge_rows;
  sc.g = p.abs_rows;
  Vector hrow = Vector::Ones(sc.h.rows());
  Vector grow = Vector::Ones(sc.g.rows());
  sc.col_scale = Vector::Ones(n);
  sc.quad = p.quad_weights;
  for (int pass = 0; pass < passes; ++pass) {
    Vector col_norm = Vector::Zero(n);
    for (Index i = 0; i < n; ++i) {
      double c = 2.0 * sc.quad(i);
      if (sc.h.rows() > 0) c = std::max(c, sc.h.col(i).cwiseAbs().maxCoeff());
      if (sc.g.rows() > 0) c = std::max(c, sc.g.col(i).cwiseAbs().maxCoeff());
      col_norm(i) = c;
    }
    // One scale for the whole PSD block keeps the cone invariant.
    if (m > 0) col_norm.head(m).setConstant(std::max(col_norm.head(m).maxCoeff(), 1.0));
    Vector cs(n);
    for (Index i = 0; i < n; ++i) cs(i) = col_norm(i) > 0.0 ? 1.0 / std::sqrt(col_norm(i)) : 1.0;
    sc.h = sc.h * cs.asDiagonal();
    sc.g = sc.g * cs.asDiagonal();
    sc.quad = sc.quad.cwiseProduct(cs.cwiseAbs2());
    sc.col_scale = sc.col_scale.cwiseProduct(cs);
    for (Index k = 0; k < sc.h.rows(); ++k) {
      const double r = sc.h.row(k).cwiseAbs().maxCoeff();
      const double f = r > 0.0 ? 1.0 / std::sqrt(r) : 1.0;
      sc.h.row(k) *= f;
      hrow(k) *= f;
    }
    for (Index k = 0; k < sc.g.rows(); ++k) {
      const double r = sc.g.row(k).cwiseAbs().maxCoeff();
      const double f = r > 0.0 ? 1.0 / std::sqrt(r) : 1.0;
      sc.g.row(k) *= f;
      grow(k) *= f;
    }
  }
  sc.h0 = p.hinge_offset.cwiseProduct(hrow);
  sc.hinge_slope = hrow.cwiseInverse();
  sc.g0 = p.abs_offset.cwiseProduct(grow);
  sc.l1_weight = p.abs_weight * grow.cwiseInverse();
  sc.row_h = hrow;
  sc.row_g = grow;
  return sc;
}

class Workspace {
 public:
  Workspace(const Problem& p, const Settings& s) : p_(p), s_(s) {
    n_ = p.num_params();
    m_ = p.psd_params();
    sc_ = equilibrate(p, s.scaling_passes);
    gram_ = Matrix::Zero(n_, n_);
    if (sc_.h.rows() > 0) gram_.selfadjointView<Eigen::Lower>().rankUpdate(sc_.h.transpose());
    if (sc_.g.rows() > 0) gram_.selfadjointView<Eigen::Lower>().rankUpdate(sc_.g.transpose());
    gram_ = gram_.selfadjointView<Eigen::Lower>();
    for (Index i = 0; i < m_; ++i) gram_(i, i) += 1.0;
    rho_ = s.rho;
    factor();
  }

  Result run();

 private:
  void factor() {
    prox_eps_ = 1e-9 * (1.0 + rho_);
    Matrix k = rho_ * gram_;
    k.diagonal() += 2.0 * sc_.quad + Vector::Constant(n_, prox_eps_);
    llt_.compute(k);
    if (llt_.info() != Eigen::Success) throw std::runtime_error("admm: factorisation failed");
  }

  // Feasible point in original coordinates: PSD block from the projected copy.
  Vector candidate(const Vector& theta, const Vector& z3) const {
    Vector c = theta;
    if (m_ > 0) c.head(m_) = z3;
    return c.cwiseProduct(sc_.col_scale);
  }

  // Lagrange dual value at the clipped multipliers; `recovered` receives the
  // Lagrangian minimiser, PSD-projected (empty when some q_i = 0).
  double dual_bound(const Vector& u1, const Vector& u2, const Vector& u3, Vector& recovered) const;

  const Problem& p_;
  const Settings& s_;
  Index n_ = 0;
  Index m_ = 0;
  Scaled sc_;
  Matrix gram_;
  Eigen::LLT<Matrix> llt_;
  double rho_ = 1.0;
  double prox_eps_ = 0.0;
};

// Lagrange dual value at multipliers read off the scaled duals and clipped to
// the conjugate domains: hinge multipliers to [-1, 0], l1 multipliers to
// [-w, w], the PSD multiplier to the PSD cone. Any such point gives a lower
// bound on the optimum, so objective - bound certifies accuracy.
double Workspace::dual_bound(const Vector& u1, const Vector& u2, const Vector& u3, Vector& recovered) const {
  Vector c = Vector::Zero(n_);
  double value = 0.0;
  if (u1.size() > 0) {
    const Vector lam = (rho_ * u1.cwiseProduct(sc_.row_h)).cwiseMax(-1.0).cwiseMin(0.0);
    value += lam.dot(p_.hinge_offset) - lam.sum();
    c.noalias() += p_.hinge_rows.transpose() * lam;
  }
  if (u2.size() > 0) {
    const double w = p_.abs_weight;
    const Vector mu = (rho_ * u2.cwiseProduct(sc_.row_g)).cwiseMax(-w).cwiseMin(w);
    value += mu.dot(p_.abs_offset);
    c.noalias() += p_.abs_rows.transpose() * mu;
  }
  if (m_ > 0) {
    const Vector s = svec(project_psd(smat(-rho_ * u3 / sc_.col_scale(0), p_.psd_dim)));
    c.head(m_) -= s;
  }
  recovered.resize(0);
  bool bounded = true;
  for (Index i = 0; i < n_; ++i) {
    const double q = p_.quad_weights(i);
    if (q > 0.0) {
      value -= c(i) * c(i) / (4.0 * q);
    } else {
      bounded = false;
      if (c(i) != 0.0) return -std::numeric_limits<double>::infinity();
    }
  }
  if (bounded) {
    recovered = -0.5 * c.cwiseQuotient(p_.quad_weights);
    if (m_ > 0) recovered.head(m_) = svec(project_psd(smat(recovered.head(m_), p_.psd_dim)));
  }
  return value;
}

Result Workspace::run() {
  const Index p1 = sc_.h.rows();
  const Index p2 = sc_.g.rows();
  const double alpha = s_.relaxation;
  const Index dim = p_.psd_dim;

  Vector theta = Vector::Zero(n_);
  if (s_.seed) {
    Rng rng(*s_.seed);
    for (Index i = 0; i < n_; ++i) theta(i) = rng.normal() / sc_.col_scale(i);
  }
  Vector z1 = sc_.h * theta + sc_.h0;
  Vector z2 = sc_.g * theta + sc_.g0;
  Vector z3 = m_ > 0 ? svec(project_psd(smat(theta.head(m_), dim))) : Vector(0);
  Vector u1 = Vector::Zero(p1), u2 = Vector::Zero(p2), u3 = Vector::Zero(m_);

  Result out;
  out.objective = std::numeric_limits<double>::infinity();
  const Vector& hinge_t = sc_.hinge_slope;
  const Vector& l1_t = sc_.l1_weight;

  Vector a1(p1), a2(p2), a3(m_), rhs(n_);
  int it = 0;
  for (it = 1; it <= s_.max_iters; ++it) {
    rhs.setZero();
    if (p1 > 0) rhs.noalias() += sc_.h.transpose() * (z1 - sc_.h0 - u1);
    if (p2 > 0) rhs.noalias() += sc_.g.transpose() * (z2 - sc_.g0 - u2);
    if (m_ > 0) rhs.head(m_) += z3 - u3;
    rhs *= rho_;
    rhs += prox_eps_ * theta;
    theta = llt_.solve(rhs);

    a1.noalias() = sc_.h * theta;
    a1 += sc_.h0;
    a2.noalias() = sc_.g * theta;
    a2 += sc_.g0;
    if (m_ > 0) a3 = theta.head(m_);

    const Vector z1_old = z1, z2_old = z2, z3_old = z3;
    for (Index k = 0; k < p1; ++k) {
      const double v = alpha * a1(k) + (1.0 - alpha) * z1_old(k);
      z1(k) = hinge_prox(v + u1(k), hinge_t(k), rho_);
      u1(k) += v - z1(k);
    }
    for (Index k = 0; k < p2; ++k) {
      const double v = alpha * a2(k) + (1.0 - alpha) * z2_old(k);
      z2(k) = soft_threshold(v + u2(k), l1_t(k) / rho_);
      u2(k) += v - z2(k);
    }
    if (m_ > 0) {
      const Vector v = alpha * a3 + (1.0 - alpha) * z3_old;
      z3 = svec(project_psd(smat(v + u3, dim)));
      u3 += v - z3;
    }

    const bool last = it == s_.max_iters;
    if (it % s_.check_every != 0 && !last) continue;

    // Residuals.
    const double r_norm = std::sqrt((a1 - z1).squaredNorm() + (a2 - z2).squaredNorm() +
                                    (m_ > 0 ? (a3 - z3).squaredNorm() : 0.0));
    const double a_norm = std::sqrt(a1.squaredNorm() + a2.squaredNorm() + a3.squaredNorm());
    const double z_norm = std::sqrt(z1.squaredNorm() + z2.squaredNorm() + z3.squaredNorm());
    Vector dz = Vector::Zero(n_), aty = Vector::Zero(n_);
    if (p1 > 0) {
      dz.noalias() += sc_.h.transpose() * (z1 - z1_old);
      aty.noalias() += sc_.h.transpose() * u1;
    }
    if (p2 > 0) {
      dz.noalias() += sc_.g.transpose() * (z2 - z2_old);
      aty.noalias() += sc_.g.transpose() * u2;
    }
    if (m_ > 0) {
      dz.head(m_) += z3 - z3_old;
      aty.head(m_) += u3;
    }
    const double s_norm = rho_ * dz.norm();
    const double primal = r_norm / std::max({a_norm, z_norm, kTiny});
    const double dual = s_norm / std::max(rho_ * aty.norm(), kTiny);

    // Termination uses absolute residuals in the caller's coordinates.
    double primal_abs = 0.0;
    if (p1 > 0) primal_abs = ((a1 - z1).cwiseQuotient(sc_.row_h)).lpNorm<Eigen::Infinity>();
    if (p2 > 0)
      primal_abs = std::max(primal_abs, ((a2 - z2).cwiseQuotient(sc_.row_g)).lpNorm<Eigen::Infinity>());
    if (m_ > 0)
      primal_abs = std::max(primal_abs, ((a3 - z3).cwiseProduct(sc_.col_scale.head(m_))).lpNorm<Eigen::Infinity>());
    const double dual_abs = rho_ * dz.cwiseQuotient(sc_.col_scale).lpNorm<Eigen::Infinity>();
    out.primal_residual = primal_abs;
    out.dual_residual = dual_abs;

    const Vector cand = candidate(theta, z3);
    const double obj = objective(p_, cand);
    if (obj < out.objective) {
      out.objective = obj;
      out.theta = cand;
    }
    Vector recovered;
    out.dual_objective = std::max(out.dual_objective, dual_bound(u1, u2, u3, recovered));
    if (recovered.size() == n_) {
      const double robj = objective(p_, recovered);
      if (robj < out.objective) {
        out.objective = robj;
        out.theta = std::move(recovered);
      }
    }
    if (s_.record_history) out.best_objective_history.push_back(out.objective);
    const double gap = (out.objective - out.dual_objective) / std::max(std::abs(out.objective), kGapFloor);
    out.relative_gap = gap;

    if (primal_abs <= s_.tol && dual_abs <= s_.tol && gap <= s_.gap_tol) {
      out.status = Status::Converged;
      break;
    }

    if (s_.step_rule == StepRule::ResidualBalancing && it % s_.adapt_every == 0 && dual > 0.0 &&
        primal > 0.0) {
      const double ratio = std::sqrt(primal / dual);
      if (ratio > 5.0 || ratio < 0.2) {
        const double next = std::clamp(rho_ * ratio, kRhoMin, kRhoMax);
        const double scale = rho_ / next;
        if (scale != 1.0) {
          u1 *= scale;
          u2 *= scale;
          u3 *= scale;
          rho_ = next;
          factor();
        }
      }
    }
  }
  out.iterations = std::min(it, s_.max_iters);
  return out;
}

}  // namespace

Matrix project_psd(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sym + sym.transpose()));
  if (es.info() != Eigen::Success) throw std::runtime_error("project_psd: eigendecomposition failed");
  const Vector clipped = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
}

double objective(const Problem& problem, const Vector& theta) {
  double total = 0.0;
  if (problem.hinge_rows.rows() > 0) {
    const Vector margin = problem.hinge_rows * theta + problem.hinge_offset;
    total += (1.0 - margin.array()).max(0.0).sum();
  }
  if (problem.abs_rows.rows() > 0 && problem.abs_weight != 0.0) {
    const Vector r = problem.abs_rows * theta + problem.abs_offset;
    total += problem.abs_weight * r.lpNorm<1>();
  }
  total += problem.quad_weights.dot(theta.cwiseAbs2());
  return total;
}

Result solve(const Problem& problem, const Settings& settings) {
  const Index n = problem.num_params();
  if (n == 0) throw std::invalid_argument("admm: empty parameter vector");
  if (problem.hinge_rows.cols() != n && problem.hinge_rows.rows() > 0)
    throw std::invalid_argument("admm: hinge block width mismatch");
  if (problem.abs_rows.cols() != n && problem.abs_rows.rows() > 0)
    throw std::invalid_argument("admm: absolute block width mismatch");
  if (problem.hinge_offset.size() != problem.hinge_rows.rows() ||
      problem.abs_offset.size() != problem.abs_rows.rows())
    throw std::invalid_argument("admm: offset length mismatch");
  if (problem.psd_params() > n) throw std::invalid_argument("admm: PSD block larger than parameter vector");
  if ((problem.quad_weights.array() < 0.0).any()) throw std::invalid_argument("admm: negative ridge weight");
  if (settings.max_iters < 1 || settings.tol <= 0.0 || settings.rho <= 0.0 || settings.check_every < 1)
    throw std::invalid_argument("admm: invalid settings");
  Workspace ws(problem, settings);
  return ws.run();
}

}  // namespace ipm::admm
