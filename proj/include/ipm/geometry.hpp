#pragma once

// Data model and linear operators of the paired-comparison ideal point model.
//
// Items x_1..x_N live in R^D. A user at ideal point u with metric M has squared
// distances d_i = (x_i - u)^T M (x_i - u); a comparison (i, j) is observed as
// y = sign(d_i - d_j). Expanding the difference cancels u^T M u, so
//
//   d_i - d_j = a_k(M) - 2 (x_i - x_j)^T M u,   a_k(M) = x_i^T M x_i - x_j^T M x_j,
//
// which is linear in M for fixed u. Everything the estimators need is built
// from the per-comparison rows r_k = x_i - x_j and s_k = x_i + x_j.

#include "ipm/linalg.hpp"

#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace ipm {

/// Raised when an input violates a documented precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ItemEmbedding {
 public:
  explicit ItemEmbedding(Matrix items);

  const Matrix& items() const { return items_; }
  Index count() const { return items_.rows(); }
  Index dim() const { return items_.cols(); }
  auto item(Index i) const { return items_.row(i).transpose(); }

 private:
  Matrix items_;
};

struct IdealPoint {
  Vector coords;

  IdealPoint() = default;
  explicit IdealPoint(Vector c);
  Index dim() const { return coords.size(); }
};

/// Symmetric PSD metric with a cached descending eigendecomposition.
class MetricMatrix {
 public:
  static constexpr double kPsdTolerance = 1e-8;

  /// Symmetrises `m` and validates symmetry and PSD-ness up to tolerance.
  explicit MetricMatrix(Matrix m);

  static MetricMatrix identity(Index dim);
  static MetricMatrix zero(Index dim);

  const Matrix& matrix() const { return m_; }
  const Matrix& eigenvectors() const { return eig_.vectors; }
  const Vector& eigenvalues() const { return eig_.values; }
  Index dim() const { return m_.rows(); }

  MetricMatrix scaled(double c) const;

 private:
  Matrix m_;
  SymmetricEigen eig_;
};

struct IndexPair {
  Index i = 0;
  Index j = 0;
  friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

/// Ordered index pairs (0-based). An ordered pair appears at most once; (i, j)
/// and (j, i) are distinct and may coexist.
class ComparisonSet {
 public:
  ComparisonSet(std::vector<IndexPair> pairs, Index item_count);

  const std::vector<IndexPair>& pairs() const { return pairs_; }
  Index size() const { return static_cast<Index>(pairs_.size()); }
  Index item_count() const { return item_count_; }
  const IndexPair& operator[](Index k) const { return pairs_[static_cast<std::size_t>(k)]; }

 private:
  std::vector<IndexPair> pairs_;
  Index item_count_;
};

/// One-bit comparison outcomes, each exactly -1 or +1.
class Observations {
 public:
  explicit Observations(Vector y);

  const Vector& values() const { return y_; }
  Index size() const { return y_.size(); }
  double operator[](Index k) const { return y_(k); }
  Observations flipped() const { return Observations(-y_); }

 private:
  Vector y_;
};

struct DistanceVector {
  Vector values;
};

/// Per-comparison operators R (rows x_i - x_j), S (rows x_i + x_j), and the
/// residual projector I - R R^+ onto the orthogonal complement of range(R).
class ComparisonOperators {
 public:
  static constexpr double kDefaultPinvTolerance = 1e-10;

  ComparisonOperators(Matrix r, Matrix s, double pinv_tol);

  const Matrix& R() const { return r_; }
  const Matrix& S() const { return s_; }
  double pinv_tol() const { return pinv_tol_; }
  Index size() const { return r_.rows(); }
  Index dim() const { return r_.cols(); }

  /// Orthonormal basis of range(R), P x rank(R).
  const Matrix& range_basis() const { return basis_; }
  Index rank() const { return basis_.cols(); }

  /// (I - R R^+) v without forming the P x P matrix.
  Vector project_residual(const Eigen::Ref<const Vector>& v) const;
  Matrix project_residual_block(const Matrix& block) const;

  /// Dense P x P projector, materialised on first use.
  const Matrix& proj_residual() const;

 private:
  struct DenseCache {
    std::once_flag once;
    Matrix value;
  };

  Matrix r_;
  Matrix s_;
  double pinv_tol_;
  Matrix basis_;
  std::shared_ptr<DenseCache> dense_ = std::make_shared<DenseCache>();
};

// --- observation model ------------------------------------------------------

double mahalanobis_distance_sq(const Eigen::Ref<const Vector>& x, const IdealPoint& u,
                               const MetricMatrix& m);

DistanceVector all_distances(const ItemEmbedding& x, const IdealPoint& u, const MetricMatrix& m);

/// Relative tie threshold used by observe().
constexpr double kTieTolerance = 1e-12;

bool is_tie(double di, double dj);

/// y_k = sign(d_i - d_j); exact ties map to +1.
Observations observe(const DistanceVector& d, const ComparisonSet& omega);

/// Number of comparisons that observe() resolved as ties.
Index count_ties(const DistanceVector& d, const ComparisonSet& omega);

/// delta_k = d_{i_k} - d_{j_k}, the rows of Q_Gamma d.
Vector delta_gamma(const DistanceVector& d, const ComparisonSet& omega);

ComparisonOperators build_operators(const ItemEmbedding& x, const ComparisonSet& omega,
                                    double pinv_tol = ComparisonOperators::kDefaultPinvTolerance);

/// a_k = s_k^T M r_k = x_i^T M x_i - x_j^T M x_j, row by row.
Vector a_of_M(const ComparisonOperators& ops, const MetricMatrix& m);
Vector a_of_M(const ComparisonOperators& ops, const Matrix& m);

/// || delta_Gamma - (a_M - 2 R M u) ||_inf for noiseless distances from (X, u, M).
double delta_identity_residual(const ComparisonOperators& ops, const MetricMatrix& m,
                               const IdealPoint& u, const ItemEmbedding& x,
                               const ComparisonSet& omega);

}  // namespace ipm
