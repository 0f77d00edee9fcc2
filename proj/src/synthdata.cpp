#include "ipm/synthdata.hpp"

#include "ipm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace ipm {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw PreconditionError(what);
}

bool accept(const Matrix& m, const Vector& u, const GenConfig& cfg) {
  if (m.norm() < cfg.eps_F) return false;
  Eigen::JacobiSVD<Matrix> svd(m);
  if (svd.singularValues().minCoeff() < cfg.eps_S) return false;
  const double un = u.norm();
  if (un == 0.0) return false;
  return (m * u).norm() / un >= cfg.eps_P;
}

}  // namespace

void GenConfig::validate() const {
  require(D >= 1 && N >= 2, "GenConfig: need D >= 1 and N >= 2");
  require(eps_F > 0.0 && eps_S > 0.0 && eps_P > 0.0, "GenConfig: thresholds must be positive");
  require(max_rejects >= 0, "GenConfig: max_rejects must be nonnegative");
}

SyntheticInstance gen_instance(const GenConfig& cfg) {
  cfg.validate();
  Rng items = Rng::substream(cfg.seed, static_cast<std::uint64_t>(Stream::Items));
  Matrix x(cfg.N, cfg.D);
  for (Index i = 0; i < cfg.N; ++i)
    for (Index k = 0; k < cfg.D; ++k) x(i, k) = items.uniform(-2.0, 2.0);

  Rng draw = Rng::substream(cfg.seed, static_cast<std::uint64_t>(Stream::MetricAndIdeal));
  Matrix m(cfg.D, cfg.D);
  Vector u(cfg.D);
  for (int attempt = 0;; ++attempt) {
    if (cfg.identity_metric) {
      m = Matrix::Identity(cfg.D, cfg.D);
    } else {
      Matrix l(cfg.D, cfg.D);
      for (Index r = 0; r < cfg.D; ++r)
        for (Index c = 0; c < cfg.D; ++c) l(r, c) = draw.normal();
      m = l.transpose() * l;
      m = 0.5 * (m + m.transpose());
    }
    for (Index k = 0; k < cfg.D; ++k) u(k) = draw.uniform(-1.0, 1.0);
    if (accept(m, u, cfg)) {
      return {ItemEmbedding(std::move(x)), IdealPoint(u), MetricMatrix(m), cfg.seed, attempt};
    }
    if (attempt >= cfg.max_rejects)
      throw std::runtime_error("gen_instance: max_rejects exceeded; thresholds are likely infeasible");
  }
}

ComparisonSet sample_comparisons(Index n, Index p, std::uint64_t seed) {
  require(n >= 2, "sample_comparisons: need at least two items");
  const std::uint64_t total = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n - 1) / 2;
  require(p >= 0 && static_cast<std::uint64_t>(p) <= total, "sample_comparisons: P exceeds the number of pairs");

  // Partial Fisher-Yates over the linear pair index, with displaced slots in a map.
  Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(Stream::Comparisons));
  std::unordered_map<std::uint64_t, std::uint64_t> moved;
  auto at = [&](std::uint64_t k) {
    auto it = moved.find(k);
    return it == moved.end() ? k : it->second;
  };
  // Row-major enumeration of i < j: row i holds n - 1 - i pairs.
  std::vector<Index> row_start(static_cast<std::size_t>(n));
  std::uint64_t acc = 0;
  for (Index i = 0; i < n; ++i) {
    row_start[static_cast<std::size_t>(i)] = static_cast<Index>(acc);
    acc += static_cast<std::uint64_t>(n - 1 - i);
  }
  std::vector<IndexPair> pairs;
  pairs.reserve(static_cast<std::size_t>(p));
  for (std::uint64_t t = 0; t < static_cast<std::uint64_t>(p); ++t) {
    const std::uint64_t pick = t + rng.below(total - t);
    const std::uint64_t value = at(pick);
    moved[pick] = at(t);
    const auto row = std::upper_bound(row_start.begin(), row_start.end(), static_cast<Index>(value)) - 1;
    const Index i = static_cast<Index>(row - row_start.begin());
    const Index j = i + 1 + (static_cast<Index>(value) - *row);
    pairs.push_back({i, j});
  }
  return ComparisonSet(std::move(pairs), n);
}

}  // namespace ipm
