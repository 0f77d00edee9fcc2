#include "ipm/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <vector>

namespace ipm::kernels {

namespace {

// Fixed chunking for reductions: partial sums are always formed over the same
// index ranges and added in chunk order, independent of the thread count.
constexpr Index kReduceChunk = 256;

bool go_parallel(Index work) { return work >= kParallelThreshold && !omp_in_parallel(); }

}  // namespace

int available_threads() { return omp_in_parallel() ? 1 : omp_get_max_threads(); }

// --- serial reference ---------------------------------------------------------

namespace serial {

Vector squared_distances(const Matrix& items, const Vector& u, const Matrix& m) {
  Vector out(items.rows());
  for (Index i = 0; i < items.rows(); ++i) {
    const Vector diff = items.row(i).transpose() - u;
    out(i) = diff.dot(m * diff);
  }
  return out;
}

Vector pair_differences(const Vector& d, std::span<const IndexPair> pairs) {
  Vector out(static_cast<Index>(pairs.size()));
  for (std::size_t k = 0; k < pairs.size(); ++k) out(static_cast<Index>(k)) = d(pairs[k].i) - d(pairs[k].j);
  return out;
}

Vector quadratic_form_rows(const Matrix& s, const Matrix& r, const Matrix& m) {
  Vector out(r.rows());
  for (Index k = 0; k < r.rows(); ++k) out(k) = s.row(k).dot(r.row(k) * m);
  return out;
}

double hinge_sum(const Vector& y, const Vector& margin) {
  double total = 0.0;
  for (Index c0 = 0; c0 < y.size(); c0 += kReduceChunk) {
    const Index c1 = std::min(y.size(), c0 + kReduceChunk);
    double part = 0.0;
    for (Index k = c0; k < c1; ++k) part += std::max(0.0, 1.0 - y(k) * margin(k));
    total += part;
  }
  return total;
}

Matrix metric_design_rows(const Matrix& items, std::span<const IndexPair> pairs) {
  const Index dim = items.cols();
  Matrix out(static_cast<Index>(pairs.size()), svec_size(dim));
  Vector a(svec_size(dim)), b(svec_size(dim));
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const Vector xi = items.row(pairs[k].i).transpose();
    const Vector xj = items.row(pairs[k].j).transpose();
    svec_sym_outer(xi, xi, a);
    svec_sym_outer(xj, xj, b);
    out.row(static_cast<Index>(k)) = (a - b).transpose();
  }
  return out;
}

Matrix bilinear_design_rows(const Matrix& r, const Vector& u) {
  Matrix out(r.rows(), svec_size(r.cols()));
  Vector row(svec_size(r.cols()));
  for (Index k = 0; k < r.rows(); ++k) {
    svec_sym_outer(r.row(k).transpose(), u, row);
    out.row(k) = row.transpose();
  }
  return out;
}

}  // namespace serial

// --- OpenMP ---------------------------------------------------------------------

namespace parallel {

Vector squared_distances(const Matrix& items, const Vector& u, const Matrix& m) {
  Vector out(items.rows());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < items.rows(); ++i) {
    const Vector diff = items.row(i).transpose() - u;
    out(i) = diff.dot(m * diff);
  }
  return out;
}

Vector pair_differences(const Vector& d, std::span<const IndexPair> pairs) {
  const Index n = static_cast<Index>(pairs.size());
  Vector out(n);
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < n; ++k) out(k) = d(pairs[static_cast<std::size_t>(k)].i) - d(pairs[static_cast<std::size_t>(k)].j);
  return out;
}

Vector quadratic_form_rows(const Matrix& s, const Matrix& r, const Matrix& m) {
  Vector out(r.rows());
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < r.rows(); ++k) out(k) = s.row(k).dot(r.row(k) * m);
  return out;
}

double hinge_sum(const Vector& y, const Vector& margin) {
  const Index chunks = (y.size() + kReduceChunk - 1) / kReduceChunk;
  std::vector<double> parts(static_cast<std::size_t>(chunks), 0.0);
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < chunks; ++c) {
    const Index c0 = c * kReduceChunk;
    const Index c1 = std::min(y.size(), c0 + kReduceChunk);
    double part = 0.0;
    for (Index k = c0; k < c1; ++k) part += std::max(0.0, 1.0 - y(k) * margin(k));
    parts[static_cast<std::size_t>(c)] = part;
  }
  double total = 0.0;
  for (double p : parts) total += p;
  return total;
}

Matrix metric_design_rows(const Matrix& items, std::span<const IndexPair> pairs) {
  const Index dim = items.cols();
  const Index n = static_cast<Index>(pairs.size());
  Matrix out(n, svec_size(dim));
#pragma omp parallel
  {
    Vector a(svec_size(dim)), b(svec_size(dim));
#pragma omp for schedule(static)
    for (Index k = 0; k < n; ++k) {
      const auto& pr = pairs[static_cast<std::size_t>(k)];
      const Vector xi = items.row(pr.i).transpose();
      const Vector xj = items.row(pr.j).transpose();
      svec_sym_outer(xi, xi, a);
      svec_sym_outer(xj, xj, b);
      out.row(k) = (a - b).transpose();
    }
  }
  return out;
}

Matrix bilinear_design_rows(const Matrix& r, const Vector& u) {
  Matrix out(r.rows(), svec_size(r.cols()));
#pragma omp parallel
  {
    Vector row(svec_size(r.cols()));
#pragma omp for schedule(static)
    for (Index k = 0; k < r.rows(); ++k) {
      svec_sym_outer(r.row(k).transpose(), u, row);
      out.row(k) = row.transpose();
    }
  }
  return out;
}

}  // namespace parallel

// --- dispatch -------------------------------------------------------------------

Vector squared_distances(const Matrix& items, const Vector& u, const Matrix& m) {
  return go_parallel(items.rows() * m.size()) ? parallel::squared_distances(items, u, m)
                                              : serial::squared_distances(items, u, m);
}

Vector pair_differences(const Vector& d, std::span<const IndexPair> pairs) {
  return go_parallel(static_cast<Index>(pairs.size())) ? parallel::pair_differences(d, pairs)
                                                       : serial::pair_differences(d, pairs);
}

Vector quadratic_form_rows(const Matrix& s, const Matrix& r, const Matrix& m) {
  return go_parallel(r.rows() * m.size()) ? parallel::quadratic_form_rows(s, r, m)
                                          : serial::quadratic_form_rows(s, r, m);
}

double hinge_sum(const Vector& y, const Vector& margin) {
  return go_parallel(y.size()) ? parallel::hinge_sum(y, margin) : serial::hinge_sum(y, margin);
}

Matrix metric_design_rows(const Matrix& items, std::span<const IndexPair> pairs) {
  const Index work = static_cast<Index>(pairs.size()) * svec_size(items.cols());
  return go_parallel(work) ? parallel::metric_design_rows(items, pairs)
                           : serial::metric_design_rows(items, pairs);
}

Matrix bilinear_design_rows(const Matrix& r, const Vector& u) {
  return go_parallel(r.rows() * svec_size(r.cols())) ? parallel::bilinear_design_rows(r, u)
                                                     : serial::bilinear_design_rows(r, u);
}

}  // namespace ipm::kernels
