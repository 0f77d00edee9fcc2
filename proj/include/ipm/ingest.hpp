#pragma once

// Admissions-style CSV ingestion.
//
// Unranked schema (one row per applicant, empty cell = missing):
//   id, category (fellowship | admit | deny),
//   gre_writing_self, gre_verbal_self, gre_quant_self,
//   gre_writing_official, gre_verbal_official, gre_quant_official,
//   gpa, lor1, lor2, lor3
//
// Ranked schema: id, score (lower is better), gre_writing, gre_verbal, gre_quant, gpa
//
// Comparisons are emitted as (preferred, less preferred) with y = -1: the
// preferred item is closer to the ideal point, so d_i - d_j < 0.

#include "ipm/geometry.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ipm {

enum class Feature { GreVerbal, GreQuant, GreWriting, Gpa, Lor };

std::string feature_name(Feature f);
Feature parse_feature(const std::string& s);
std::vector<Feature> parse_feature_list(const std::string& csv);

inline const std::vector<Feature> kUnrankedFeatures{Feature::GreVerbal, Feature::GreQuant, Feature::GreWriting,
                                                    Feature::Gpa, Feature::Lor};
inline const std::vector<Feature> kRankedFeatures{Feature::GreVerbal, Feature::GreQuant, Feature::GreWriting,
                                                  Feature::Gpa};

/// exp of the mean of the available letter scores (each in [0, 3]).
double lor_score(const std::vector<double>& letters);

struct IngestResult {
  ItemEmbedding X;
  ComparisonSet omega;
  Observations y;
  std::vector<std::string> feature_names;
  std::vector<std::string> ids;   // per item
  std::vector<double> labels;     // per item; lower is preferred (category rank or score)
  std::vector<std::string> drop_log;
};

struct CategoryCounts {
  Index fellowship = 33;
  Index admit = 33;
  Index deny = 34;
};

IngestResult ingest_unranked(const std::filesystem::path& csv_path, const CategoryCounts& counts, std::uint64_t seed,
                             const std::vector<Feature>& features = kUnrankedFeatures);

IngestResult ingest_ranked(const std::filesystem::path& csv_path,
                           const std::vector<Feature>& features = kRankedFeatures);

/// Number of comparisons whose y disagrees with the labels (equal labels count
/// as disagreements). Zero for every ingest result.
Index verify_labels(const std::vector<double>& labels, const ComparisonSet& omega, const Observations& y);

}  // namespace ipm
