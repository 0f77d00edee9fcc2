#include "ipm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace ipm {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw PreconditionError(what);
}

void require_permutation(const std::vector<Index>& r, std::size_t n, const char* what) {
  require(r.size() == n, what);
  std::vector<char> seen(n, 0);
  for (Index v : r) {
    require(v >= 0 && static_cast<std::size_t>(v) < n && !seen[static_cast<std::size_t>(v)], what);
    seen[static_cast<std::size_t>(v)] = 1;
  }
}

}  // namespace

double ur_error(const IdealPoint& u_hat, const IdealPoint& u_true, const MetricMatrix& m_true) {
  require(u_hat.dim() == m_true.dim() && u_true.dim() == m_true.dim(), "ur_error: dimension mismatch");
  const Matrix& m = m_true.matrix();
  const double denom = u_true.coords.dot(m * u_true.coords);
  require(denom > 0.0, "ur_error: ||u||_M is zero");
  const Vector e = u_hat.coords - u_true.coords;
  return e.dot(m * e) / denom;
}

double wer_error(const MetricMatrix& m_true, const MetricMatrix& m_hat) {
  require(m_true.dim() == m_hat.dim(), "wer_error: dimension mismatch");
  const Vector& lam = m_true.eigenvalues();
  const double denom = lam.squaredNorm();
  require(denom > 0.0, "wer_error: true metric is zero");
  // L is diagonal, so the elementwise product keeps only |v_i . vhat_i|.
  double num = 0.0;
  for (Index i = 0; i < lam.size(); ++i) {
    const double c = std::abs(m_true.eigenvectors().col(i).dot(m_hat.eigenvectors().col(i)));
    num += lam(i) * lam(i) * (c - 1.0) * (c - 1.0);
  }
  return num / denom;
}

double kendall_tau_norm(const std::vector<Index>& rank_a, const std::vector<Index>& rank_b) {
  require(rank_a.size() == rank_b.size(), "kendall_tau_norm: length mismatch");
  const std::size_t n = rank_a.size();
  require(n >= 2, "kendall_tau_norm: need at least two items");
  require_permutation(rank_a, n, "kendall_tau_norm: not a permutation");
  require_permutation(rank_b, n, "kendall_tau_norm: not a permutation");
  // Position of every item in b, then count inversions of a read through it
  // (merge sort, O(N log N)).
  std::vector<std::size_t> pos_b(n);
  for (std::size_t r = 0; r < n; ++r) pos_b[static_cast<std::size_t>(rank_b[r])] = r;
  std::vector<std::size_t> seq(n), buf(n);
  for (std::size_t r = 0; r < n; ++r) seq[r] = pos_b[static_cast<std::size_t>(rank_a[r])];
  std::uint64_t inversions = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n), hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (seq[i] <= seq[j]) {
          buf[k++] = seq[i++];
        } else {
          inversions += mid - i;
          buf[k++] = seq[j++];
        }
      }
      while (i < mid) buf[k++] = seq[i++];
      while (j < hi) buf[k++] = seq[j++];
    }
    seq.swap(buf);
  }
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return static_cast<double>(inversions) / pairs;
}

double topk_fraction(const std::vector<Index>& rank_est, const std::vector<Index>& rank_true, Index k) {
  require(rank_est.size() == rank_true.size(), "topk_fraction: length mismatch");
  require(k >= 1 && static_cast<std::size_t>(k) <= rank_est.size(), "topk_fraction: K out of range");
  std::unordered_set<Index> top(rank_true.begin(), rank_true.begin() + k);
  Index hits = 0;
  for (Index r = 0; r < k; ++r) hits += top.count(rank_est[static_cast<std::size_t>(r)]) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(k);
}

double median(std::vector<double> samples) {
  require(!samples.empty(), "median: empty sample");
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  return n % 2 == 1 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
}

double interpolated_median(std::vector<double> samples, double w) {
  require(!samples.empty(), "interpolated_median: empty sample");
  require(w > 0.0, "interpolated_median: grid spacing must be positive");
  const double m = median(samples);
  const double n = static_cast<double>(samples.size());
  double below = 0.0, at = 0.0;
  for (double v : samples) {
    if (v < m) below += 1.0;
    else if (v == m) at += 1.0;
  }
  if (at == 0.0) return m;  // even count straddling two classes
  return (m - 0.5 * w) + w * (0.5 * n - below) / at;
}

std::vector<double> quantiles(std::vector<double> samples, const std::vector<double>& qs) {
  require(!samples.empty(), "quantiles: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  std::vector<double> out;
  out.reserve(qs.size());
  for (double q : qs) {
    require(q >= 0.0 && q <= 1.0, "quantiles: q outside [0, 1]");
    const double h = (n - 1.0) * q;  // zero-based form of (n - 1) q + 1
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, samples.size() - 1);
    out.push_back(samples[lo] + (h - static_cast<double>(lo)) * (samples[hi] - samples[lo]));
  }
  return out;
}

}  // namespace ipm
