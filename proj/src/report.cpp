#include "ipm/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace ipm {

std::vector<EigenTerm> eigen_report(const MetricMatrix& m, const std::vector<std::string>& feature_names,
                                    const EigenReportOptions& opts) {
  if (static_cast<Index>(feature_names.size()) != m.dim())
    throw PreconditionError("eigen_report: need one name per dimension");
  std::vector<EigenTerm> out;
  for (Index c = 0; c < m.dim(); ++c) {
    Vector v = m.eigenvectors().col(c);
    Index top = 0;
    v.cwiseAbs().maxCoeff(&top);
    if (v(top) < 0.0) v = -v;

    std::vector<Index> order(static_cast<std::size_t>(v.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return std::abs(v(a)) > std::abs(v(b)); });
    std::string s;
    for (Index k : order) {
      const double w = v(k);
      if (std::abs(w) < opts.min_loading && k != top) continue;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.*f", opts.precision, std::abs(w));
      if (s.empty()) s += w < 0.0 ? "-" : "+";
      else s += w < 0.0 ? " - " : " + ";
      s += buf;
      s += " " + feature_names[static_cast<std::size_t>(k)];
    }
    out.push_back({m.eigenvalues()(c), s});
  }
  return out;
}

std::string render_eigen_report(const std::vector<EigenTerm>& terms) {
  std::string out;
  for (const auto& t : terms) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", t.eigenvalue);
    out += std::string(buf) + "\t" + t.loadings + "\n";
  }
  return out;
}

}  // namespace ipm
