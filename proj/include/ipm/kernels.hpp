#pragma once

// Data-parallel loops over items and comparisons. Each kernel exists twice:
// `serial` is the reference implementation and `parallel` the OpenMP version.
// The parallel versions assign every output entry to exactly one thread and
// combine partial sums in a fixed order, so both produce identical bits.
// The unqualified entry points dispatch on problem size.

#include "ipm/geometry.hpp"

#include <span>

namespace ipm::kernels {

/// Work size below which the dispatchers stay serial.
inline constexpr Index kParallelThreshold = 2048;

#define IPM_KERNEL_DECLS                                                                     \
  Vector squared_distances(const Matrix& items, const Vector& u, const Matrix& m);           \
  Vector pair_differences(const Vector& d, std::span<const IndexPair> pairs);                \
  Vector quadratic_form_rows(const Matrix& s, const Matrix& r, const Matrix& m);             \
  double hinge_sum(const Vector& y, const Vector& margin);                                   \
  Matrix metric_design_rows(const Matrix& items, std::span<const IndexPair> pairs);          \
  Matrix bilinear_design_rows(const Matrix& r, const Vector& u);

namespace serial {
IPM_KERNEL_DECLS
}

namespace parallel {
IPM_KERNEL_DECLS
}

IPM_KERNEL_DECLS

#undef IPM_KERNEL_DECLS

/// Threads the parallel kernels would use right now (1 inside an active
/// parallel region).
int available_threads();

}  // namespace ipm::kernels
