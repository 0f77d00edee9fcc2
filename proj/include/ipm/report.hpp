#pragma once

// Human-readable eigenstructure of a learned metric.

#include "ipm/geometry.hpp"

#include <string>
#include <vector>

namespace ipm {

struct EigenTerm {
  double eigenvalue = 0.0;
  std::string loadings;  // e.g. "+0.909 gre_writing - 0.392 gpa"
};

struct EigenReportOptions {
  double min_loading = 0.1;  // terms with smaller |loading| are omitted
  int precision = 3;
};

/// Eigenpairs in descending order. Each eigenvector is sign-canonicalised so
/// its largest-magnitude entry is positive, then rendered by |loading|.
std::vector<EigenTerm> eigen_report(const MetricMatrix& m, const std::vector<std::string>& feature_names,
                                    const EigenReportOptions& opts = {});

std::string render_eigen_report(const std::vector<EigenTerm>& terms);

}  // namespace ipm
