#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace ipm {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Number of free entries of a symmetric D x D matrix.
constexpr Index svec_size(Index dim) { return dim * (dim + 1) / 2; }

/// Scaled half-vectorisation: off-diagonal entries carry a sqrt(2) factor so
/// that <A, B>_F == svec(A) . svec(B). Column-major lower triangle.
Vector svec(const Matrix& sym);
Matrix smat(const Eigen::Ref<const Vector>& v, Index dim);

/// svec of (a b^T + b a^T) / 2, without forming the outer product.
void svec_sym_outer(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b,
                    Eigen::Ref<Vector> out);

struct SymmetricEigen {
  Vector values;   // descending
  Matrix vectors;  // columns match values
};

/// Eigendecomposition of a symmetric matrix, eigenvalues sorted descending.
SymmetricEigen eigen_descending(const Matrix& sym);

/// Moore-Penrose pseudoinverse; singular values below rel_tol * sigma_max are
/// treated as zero.
Matrix pseudo_inverse(const Matrix& a, double rel_tol);

/// Orthonormal basis of the column space of a, same cutoff rule as
/// pseudo_inverse.
Matrix column_space_basis(const Matrix& a, double rel_tol);

double max_asymmetry(const Matrix& a);

}  // namespace ipm
