#pragma once

// Plain-text interchange: CSV tables, instance files and estimate files.
//
// Instance layout for a stem `s`:
//   s.csv          N rows of item features, header x0..x{D-1}
//   s.ideal.csv    one row, the ideal point
//   s.metric.csv   D rows, the metric
//   s.manifest     key=value generation record (seed, thresholds, ...)
//   s.cmp.csv      comparisons, header i,j,y (0-based indices)

#include "ipm/estimators.hpp"
#include "ipm/geometry.hpp"
#include "ipm/synthdata.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace ipm::io {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws IoError when absent.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

/// RFC-4180 reader: quoted fields, doubled quotes, CRLF tolerated.
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

std::string csv_field(const std::string& s);
std::string csv_row(const std::vector<std::string>& fields);

/// Shortest round-trip decimal form (std::to_chars).
std::string format_double(double v);
double parse_double(const std::string& s, const char* context);
long long parse_int(const std::string& s, const char* context);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

Matrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m, const std::string& prefix);

std::filesystem::path with_suffix(const std::filesystem::path& stem, const std::string& suffix);

void write_instance(const std::filesystem::path& stem, const SyntheticInstance& inst, const GenConfig& cfg);
void write_comparisons(const std::filesystem::path& path, const ComparisonSet& omega, const Observations& y);

ItemEmbedding read_items(const std::filesystem::path& path);
IdealPoint read_ideal(const std::filesystem::path& path);
MetricMatrix read_metric(const std::filesystem::path& path);

struct LabeledComparisons {
  ComparisonSet omega;
  Observations y;
};
LabeledComparisons read_comparisons(const std::filesystem::path& path, Index item_count);

/// s.metric.csv, s.ideal.csv, s.ranking.csv (rank,item,distance).
void write_estimate(const std::filesystem::path& stem, const ItemEmbedding& x, const Estimate& e);

std::map<std::string, std::string> parse_key_values(const std::string& text);

}  // namespace ipm::io
