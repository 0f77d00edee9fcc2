#include "ipm/geometry.hpp"

#include "ipm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

namespace ipm {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw PreconditionError(what);
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace

ItemEmbedding::ItemEmbedding(Matrix items) : items_(std::move(items)) {
  require(items_.rows() >= 2, "ItemEmbedding: need at least two items");
  require(items_.cols() >= 1, "ItemEmbedding: need at least one feature");
  require(all_finite(items_), "ItemEmbedding: non-finite entry");
}

IdealPoint::IdealPoint(Vector c) : coords(std::move(c)) {
  require(coords.allFinite(), "IdealPoint: non-finite entry");
}

MetricMatrix::MetricMatrix(Matrix m) {
  require(m.rows() == m.cols() && m.rows() >= 1, "MetricMatrix: must be square");
  require(all_finite(m), "MetricMatrix: non-finite entry");
  const double scale = std::max(1.0, m.norm());
  require(max_asymmetry(m) <= 1e-10 * scale, "MetricMatrix: not symmetric");
  m_ = 0.5 * (m + m.transpose());
  eig_ = eigen_descending(m_);
  const double top = std::max(0.0, eig_.values(0));
  require(eig_.values(m_.rows() - 1) >= -kPsdTolerance * std::max(top, 1e-300),
          "MetricMatrix: not positive semidefinite");
}

MetricMatrix MetricMatrix::identity(Index dim) { return MetricMatrix(Matrix::Identity(dim, dim)); }

MetricMatrix MetricMatrix::zero(Index dim) { return MetricMatrix(Matrix::Zero(dim, dim)); }

MetricMatrix MetricMatrix::scaled(double c) const {
  require(c >= 0.0, "MetricMatrix::scaled: negative factor");
  return MetricMatrix(c * m_);
}

ComparisonSet::ComparisonSet(std::vector<IndexPair> pairs, Index item_count)
    : pairs_(std::move(pairs)), item_count_(item_count) {
  require(item_count_ >= 2, "ComparisonSet: need at least two items");
  std::unordered_set<Index> seen;
  seen.reserve(pairs_.size() * 2);
  for (const auto& p : pairs_) {
    require(p.i >= 0 && p.i < item_count_ && p.j >= 0 && p.j < item_count_,
            "ComparisonSet: index out of range");
    require(p.i != p.j, "ComparisonSet: self comparison");
    require(seen.insert(p.i * item_count_ + p.j).second, "ComparisonSet: duplicate ordered pair");
  }
}

Observations::Observations(Vector y) : y_(std::move(y)) {
  for (Index k = 0; k < y_.size(); ++k)
    require(y_(k) == 1.0 || y_(k) == -1.0, "Observations: entries must be +1 or -1");
}

ComparisonOperators::ComparisonOperators(Matrix r, Matrix s, double pinv_tol)
    : r_(std::move(r)), s_(std::move(s)), pinv_tol_(pinv_tol) {
  require(pinv_tol_ > 0.0, "ComparisonOperators: pinv_tol must be positive");
  require(r_.rows() == s_.rows() && r_.cols() == s_.cols(), "ComparisonOperators: R/S shape mismatch");
  basis_ = column_space_basis(r_, pinv_tol_);
}

Vector ComparisonOperators::project_residual(const Eigen::Ref<const Vector>& v) const {
  if (basis_.cols() == 0) return v;
  return v - basis_ * (basis_.transpose() * v);
}

Matrix ComparisonOperators::project_residual_block(const Matrix& block) const {
  if (basis_.cols() == 0) return block;
  return block - basis_ * (basis_.transpose() * block);
}

const Matrix& ComparisonOperators::proj_residual() const {
  std::call_once(dense_->once, [this] {
    const Index p = r_.rows();
    dense_->value = Matrix::Identity(p, p) - basis_ * basis_.transpose();
  });
  return dense_->value;
}

double mahalanobis_distance_sq(const Eigen::Ref<const Vector>& x, const IdealPoint& u,
                               const MetricMatrix& m) {
  require(x.size() == m.dim() && u.dim() == m.dim(), "mahalanobis_distance_sq: dimension mismatch");
  const Vector diff = x - u.coords;
  return diff.dot(m.matrix() * diff);
}

DistanceVector all_distances(const ItemEmbedding& x, const IdealPoint& u, const MetricMatrix& m) {
  require(x.dim() == m.dim() && u.dim() == m.dim(), "all_distances: dimension mismatch");
  return {kernels::squared_distances(x.items(), u.coords, m.matrix())};
}

bool is_tie(double di, double dj) {
  return std::abs(di - dj) <= kTieTolerance * std::max(1.0, std::abs(di) + std::abs(dj));
}

namespace {
void require_indices(const DistanceVector& d, const ComparisonSet& omega) {
  require(d.values.size() >= omega.item_count(), "comparison index exceeds distance vector");
}
}  // namespace

Observations observe(const DistanceVector& d, const ComparisonSet& omega) {
  require_indices(d, omega);
  Vector y(omega.size());
  for (Index k = 0; k < omega.size(); ++k) {
    const double di = d.values(omega[k].i);
    const double dj = d.values(omega[k].j);
    y(k) = (is_tie(di, dj) || di > dj) ? 1.0 : -1.0;
  }
  return Observations(std::move(y));
}

Index count_ties(const DistanceVector& d, const ComparisonSet& omega) {
  require_indices(d, omega);
  Index ties = 0;
  for (const auto& p : omega.pairs()) ties += is_tie(d.values(p.i), d.values(p.j)) ? 1 : 0;
  return ties;
}

Vector delta_gamma(const DistanceVector& d, const ComparisonSet& omega) {
  require_indices(d, omega);
  return kernels::pair_differences(d.values, omega.pairs());
}

ComparisonOperators build_operators(const ItemEmbedding& x, const ComparisonSet& omega,
                                    double pinv_tol) {
  require(omega.item_count() <= x.count(), "build_operators: comparison indices exceed item count");
  const Index p = omega.size();
  Matrix r(p, x.dim()), s(p, x.dim());
  for (Index k = 0; k < p; ++k) {
    const auto xi = x.items().row(omega[k].i);
    const auto xj = x.items().row(omega[k].j);
    r.row(k) = xi - xj;
    s.row(k) = xi + xj;
  }
  return ComparisonOperators(std::move(r), std::move(s), pinv_tol);
}

Vector a_of_M(const ComparisonOperators& ops, const Matrix& m) {
  require(m.rows() == ops.dim() && m.cols() == ops.dim(), "a_of_M: dimension mismatch");
  return kernels::quadratic_form_rows(ops.S(), ops.R(), m);
}

Vector a_of_M(const ComparisonOperators& ops, const MetricMatrix& m) { return a_of_M(ops, m.matrix()); }

double delta_identity_residual(const ComparisonOperators& ops, const MetricMatrix& m,
                               const IdealPoint& u, const ItemEmbedding& x,
                               const ComparisonSet& omega) {
  const Vector delta = delta_gamma(all_distances(x, u, m), omega);
  const Vector model = a_of_M(ops, m) - 2.0 * ops.R() * (m.matrix() * u.coords);
  return delta.size() == 0 ? 0.0 : (delta - model).cwiseAbs().maxCoeff();
}

}  // namespace ipm
