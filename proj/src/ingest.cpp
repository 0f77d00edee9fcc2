#include "ipm/ingest.hpp"

#include "ipm/io.hpp"
#include "ipm/rng.hpp"

#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

namespace ipm {

namespace {

using io::IoError;

std::optional<double> cell(const io::CsvTable& t, const std::vector<std::string>& row, const std::string& col) {
  const std::string& s = row[t.column(col)];
  if (s.find_first_not_of(" \t") == std::string::npos) return std::nullopt;
  return io::parse_double(s, col.c_str());
}

bool is_half_step(double v) { return std::abs(2.0 * v - std::round(2.0 * v)) < 1e-9; }
bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-9; }

struct Candidate {
  std::string id;
  double label = 0.0;
  Vector features;
};

// Features of one applicant, or the reason it is dropped.
std::optional<Vector> extract(const io::CsvTable& t, const std::vector<std::string>& row,
                              const std::vector<Feature>& features, bool official_split, std::string& reason) {
  auto gre = [&](const std::string& part) -> std::optional<double> {
    if (!official_split) return cell(t, row, "gre_" + part);
    if (auto v = cell(t, row, "gre_" + part + "_official")) return v;
    return cell(t, row, "gre_" + part + "_self");
  };
  Vector out(static_cast<Index>(features.size()));
  for (std::size_t k = 0; k < features.size(); ++k) {
    std::optional<double> v;
    switch (features[k]) {
      case Feature::GreVerbal:
      case Feature::GreQuant: {
        const bool verbal = features[k] == Feature::GreVerbal;
        v = gre(verbal ? "verbal" : "quant");
        if (v && (!is_integer(*v) || *v < 130.0 || *v > 170.0)) {
          reason = feature_name(features[k]) + " outside integer range [130, 170]";
          return std::nullopt;
        }
        break;
      }
      case Feature::GreWriting:
        v = gre("writing");
        if (v && (!is_half_step(*v) || *v < 0.0 || *v > 6.0)) {
          reason = "gre_writing outside half steps of [0, 6]";
          return std::nullopt;
        }
        break;
      case Feature::Gpa:
        v = cell(t, row, "gpa");
        if (v && (*v < 1.0 || *v > 4.0)) {
          reason = "gpa " + io::format_double(*v) + " outside [1, 4]";
          return std::nullopt;
        }
        break;
      case Feature::Lor: {
        std::vector<double> letters;
        for (const char* c : {"lor1", "lor2", "lor3"}) {
          if (auto l = cell(t, row, c)) {
            if (*l < 0.0 || *l > 3.0) {
              reason = std::string(c) + " outside [0, 3]";
              return std::nullopt;
            }
            letters.push_back(*l);
          }
        }
        if (!letters.empty()) v = lor_score(letters);
        break;
      }
    }
    if (!v) {
      reason = "missing " + feature_name(features[k]);
      return std::nullopt;
    }
    out(static_cast<Index>(k)) = *v;
  }
  return out;
}

IngestResult assemble(std::vector<Candidate> items, const std::vector<Feature>& features,
                      std::vector<IndexPair> pairs, std::vector<std::string> drop_log) {
  Matrix x(static_cast<Index>(items.size()), static_cast<Index>(features.size()));
  std::vector<std::string> ids;
  std::vector<double> labels;
  for (std::size_t i = 0; i < items.size(); ++i) {
    x.row(static_cast<Index>(i)) = items[i].features.transpose();
    ids.push_back(items[i].id);
    labels.push_back(items[i].label);
  }
  std::vector<std::string> names;
  for (Feature f : features) names.push_back(feature_name(f));
  const Index n = static_cast<Index>(items.size());
  Vector y = Vector::Constant(static_cast<Index>(pairs.size()), -1.0);
  return {ItemEmbedding(std::move(x)), ComparisonSet(std::move(pairs), n), Observations(std::move(y)),
          std::move(names), std::move(ids), std::move(labels), std::move(drop_log)};
}

}  // namespace

std::string feature_name(Feature f) {
  switch (f) {
    case Feature::GreVerbal: return "gre_verbal";
    case Feature::GreQuant: return "gre_quant";
    case Feature::GreWriting: return "gre_writing";
    case Feature::Gpa: return "gpa";
    case Feature::Lor: return "lor";
  }
  return "unknown";
}

Feature parse_feature(const std::string& s) {
  for (Feature f : kUnrankedFeatures)
    if (feature_name(f) == s) return f;
  throw IoError("unknown feature '" + s + "'");
}

std::vector<Feature> parse_feature_list(const std::string& csv) {
  std::vector<Feature> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const Feature f = parse_feature(item);
    for (Feature g : out)
      if (g == f) throw IoError("duplicate feature '" + item + "'");
    out.push_back(f);
  }
  if (out.empty()) throw IoError("empty feature list");
  return out;
}

double lor_score(const std::vector<double>& letters) {
  if (letters.empty() || letters.size() > 3) throw PreconditionError("lor_score: need one to three letters");
  for (double l : letters)
    if (l < 0.0 || l > 3.0) throw PreconditionError("lor_score: letter score outside [0, 3]");
  return std::exp(std::accumulate(letters.begin(), letters.end(), 0.0) / static_cast<double>(letters.size()));
}

IngestResult ingest_unranked(const std::filesystem::path& csv_path, const CategoryCounts& counts, std::uint64_t seed,
                             const std::vector<Feature>& features) {
  const io::CsvTable t = io::read_csv(csv_path);
  for (const char* c : {"id", "category", "gre_writing_self", "gre_verbal_self", "gre_quant_self",
                        "gre_writing_official", "gre_verbal_official", "gre_quant_official", "gpa", "lor1", "lor2",
                        "lor3"})
    t.column(c);
  if (features.empty()) throw IoError("ingest_unranked: empty feature list");

  const std::array<std::string, 3> names{"fellowship", "admit", "deny"};
  std::array<std::vector<Candidate>, 3> pool;
  std::vector<std::string> drops;
  for (const auto& row : t.rows) {
    const std::string& id = row[t.column("id")];
    const std::string& cat = row[t.column("category")];
    int c = -1;
    for (int k = 0; k < 3; ++k)
      if (cat == names[static_cast<std::size_t>(k)]) c = k;
    if (c < 0) throw IoError(csv_path.string() + ": unknown category '" + cat + "' for id " + id);
    std::string reason;
    auto f = extract(t, row, features, true, reason);
    if (!f) {
      drops.push_back(id + ": " + reason);
      continue;
    }
    pool[static_cast<std::size_t>(c)].push_back({id, static_cast<double>(c), std::move(*f)});
  }

  const std::array<Index, 3> want{counts.fellowship, counts.admit, counts.deny};
  std::vector<Candidate> items;
  std::array<std::pair<Index, Index>, 3> span{};
  for (std::size_t c = 0; c < 3; ++c) {
    auto& p = pool[c];
    if (want[c] < 0 || static_cast<std::size_t>(want[c]) > p.size())
      throw PreconditionError("ingest_unranked: only " + std::to_string(p.size()) + " usable '" + names[c] +
                              "' candidates, " + std::to_string(want[c]) + " requested");
    // Partial Fisher-Yates on the usable pool, one substream per category.
    Rng rng = Rng::substream(seed, c + 1);
    for (std::size_t k = 0; k < static_cast<std::size_t>(want[c]); ++k)
      std::swap(p[k], p[k + rng.below(p.size() - k)]);
    span[c] = {static_cast<Index>(items.size()), want[c]};
    for (Index k = 0; k < want[c]; ++k) items.push_back(p[static_cast<std::size_t>(k)]);
  }

  std::vector<IndexPair> pairs;
  for (std::size_t better = 0; better < 3; ++better)
    for (std::size_t worse = better + 1; worse < 3; ++worse)
      for (Index i = 0; i < span[better].second; ++i)
        for (Index j = 0; j < span[worse].second; ++j)
          pairs.push_back({span[better].first + i, span[worse].first + j});
  return assemble(std::move(items), features, std::move(pairs), std::move(drops));
}

IngestResult ingest_ranked(const std::filesystem::path& csv_path, const std::vector<Feature>& features) {
  const io::CsvTable t = io::read_csv(csv_path);
  for (const char* c : {"id", "score", "gre_writing", "gre_verbal", "gre_quant", "gpa"}) t.column(c);
  if (t.rows.empty()) throw IoError(csv_path.string() + ": no candidates");
  for (Feature f : features)
    if (f == Feature::Lor) throw IoError("ingest_ranked: the ranked schema has no letters");
  if (features.empty()) throw IoError("ingest_ranked: empty feature list");

  std::vector<Candidate> items;
  std::vector<std::string> drops;
  for (const auto& row : t.rows) {
    const std::string& id = row[t.column("id")];
    const auto score = cell(t, row, "score");
    std::string reason;
    auto f = extract(t, row, features, false, reason);
    if (!score) reason = "missing score";
    if (!f || !score) {
      drops.push_back(id + ": " + reason);
      continue;
    }
    items.push_back({id, *score, std::move(*f)});
  }
  if (items.size() < 2) throw IoError(csv_path.string() + ": fewer than two usable candidates");

  std::vector<IndexPair> pairs;
  const Index n = static_cast<Index>(items.size());
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const double si = items[static_cast<std::size_t>(i)].label, sj = items[static_cast<std::size_t>(j)].label;
      if (si < sj) pairs.push_back({i, j});
      else if (sj < si) pairs.push_back({j, i});
    }
  return assemble(std::move(items), features, std::move(pairs), std::move(drops));
}

Index verify_labels(const std::vector<double>& labels, const ComparisonSet& omega, const Observations& y) {
  if (y.size() != omega.size() || static_cast<Index>(labels.size()) < omega.item_count())
    throw PreconditionError("verify_labels: size mismatch");
  Index bad = 0;
  for (Index k = 0; k < omega.size(); ++k) {
    const double li = labels[static_cast<std::size_t>(omega[k].i)];
    const double lj = labels[static_cast<std::size_t>(omega[k].j)];
    const double expect = li < lj ? -1.0 : (li > lj ? 1.0 : 0.0);
    bad += expect == y[k] ? 0 : 1;
  }
  return bad;
}

}  // namespace ipm
