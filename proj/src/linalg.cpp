#include "ipm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace ipm {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

Vector svec(const Matrix& sym) {
  const Index dim = sym.rows();
  Vector out(svec_size(dim));
  Index k = 0;
  for (Index j = 0; j < dim; ++j) {
    out(k++) = sym(j, j);
    for (Index i = j + 1; i < dim; ++i) out(k++) = kSqrt2 * 0.5 * (sym(i, j) + sym(j, i));
  }
  return out;
}

Matrix smat(const Eigen::Ref<const Vector>& v, Index dim) {
  if (v.size() != svec_size(dim)) throw std::invalid_argument("smat: length does not match dimension");
  Matrix out(dim, dim);
  Index k = 0;
  for (Index j = 0; j < dim; ++j) {
    out(j, j) = v(k++);
    for (Index i = j + 1; i < dim; ++i) {
      const double off = v(k++) / kSqrt2;
      out(i, j) = off;
      out(j, i) = off;
    }
  }
  return out;
}

void svec_sym_outer(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b,
                    Eigen::Ref<Vector> out) {
  const Index dim = a.size();
  Index k = 0;
  for (Index j = 0; j < dim; ++j) {
    out(k++) = a(j) * b(j);
    for (Index i = j + 1; i < dim; ++i) out(k++) = kSqrt2 * 0.5 * (a(i) * b(j) + a(j) * b(i));
  }
}

SymmetricEigen eigen_descending(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (sym + sym.transpose()));
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  const Index dim = sym.rows();
  SymmetricEigen out{Vector(dim), Matrix(dim, dim)};
  // Eigen sorts ascending.
  for (Index k = 0; k < dim; ++k) {
    out.values(k) = solver.eigenvalues()(dim - 1 - k);
    out.vectors.col(k) = solver.eigenvectors().col(dim - 1 - k);
  }
  return out;
}

Matrix pseudo_inverse(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return Matrix::Zero(a.cols(), a.rows());
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double cutoff = rel_tol * (sv.size() > 0 ? sv(0) : 0.0);
  Vector inv = Vector::Zero(sv.size());
  for (Index k = 0; k < sv.size(); ++k)
    if (sv(k) > cutoff && sv(k) > 0.0) inv(k) = 1.0 / sv(k);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix column_space_basis(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return Matrix(a.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  const double cutoff = rel_tol * sv(0);
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff && sv(rank) > 0.0) ++rank;
  return svd.matrixU().leftCols(rank);
}

double max_asymmetry(const Matrix& a) { return (a - a.transpose()).cwiseAbs().maxCoeff(); }

}  // namespace ipm
