#pragma once

// Seeded Monte Carlo experiments over synthetic instances.
//
// Seeds: the instance of (D, trial) uses derive_seed(base_seed, {D, trial});
// its comparisons for a given P use derive_seed(instance seed, {P}). An
// alternating sweep keeps a single instance per D, derive_seed(base_seed, {D}),
// and varies only the comparisons, derive_seed(instance seed, {P, trial}).

#include "ipm/estimators.hpp"
#include "ipm/synthdata.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace ipm {

inline constexpr int kTrialSchemaVersion = 1;
inline constexpr int kAggregateSchemaVersion = 1;

enum class ExperimentKind { SingleStepSweep, EuclideanComparison, AlternatingSweep, IdentitySweep };

std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& s);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::SingleStepSweep;
  std::vector<Index> D_list{2};
  Index N = 100;
  std::vector<Index> P_list{10};
  int trials = 20;
  std::vector<Index> K_list{10};
  RegularizationParams params;
  AlternatingParams alt;     // AlternatingSweep only; stop mode from alt_stop
  bool alt_ground_truth_stop = true;
  double lambda_ridge = kDefaultEuclideanRidge;
  SolverConfig solver;
  double eps_F = 0.5, eps_S = 0.25, eps_P = 0.2;
  std::uint64_t base_seed = 1;
  std::filesystem::path output;  // writes <output>.trials.csv and <output>.aggregate.csv
  int threads = 0;               // 0: IPMETRIC_THREADS or the OpenMP default

  void validate() const;
};

/// Parses the flat key=value format; unknown keys are errors.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
/// Documented keys, for --help.
std::string experiment_config_keys();

/// Regularization sets by name:
///   synthetic       2, 0.002, 0.001, 1 (the library default)
///   unranked        1/650, 1/6500, (2/65)e-6, 1
///   ranked          3/800, 1/8000, (5/8)e-11, 1
///   ranked_kendall  7/6002, 1/6002, (2/6002)e-4, 1
RegularizationParams named_preset(const std::string& name);
std::vector<std::string> preset_names();

struct TrialRecord {
  ExperimentKind kind{};
  Index D = 0, N = 0, P = 0;
  int trial_index = 0;
  std::uint64_t seed = 0;
  std::string method;
  double ur_error = 0.0;
  double wer_error = 0.0;
  double kendall_norm = 0.0;
  std::map<Index, double> topk;
  SolverStatus solver_status = SolverStatus::Converged;
  int iters = 1;
  Index ties = 0;
  double wall_ms = 0.0;
};

struct AggregateRow {
  ExperimentKind kind{};
  Index D = 0, P = 0;
  std::string method;
  std::string metric;
  int n = 0;
  double median = 0.0;
  double interp_median = 0.0;  // grid 1/K for top-K metrics, else the median
  double q25 = 0.0, q75 = 0.0;
};

struct ExperimentResult {
  std::vector<TrialRecord> trials;
  std::vector<AggregateRow> aggregate;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::vector<std::string> trial_header(const std::vector<Index>& k_list);
std::string trials_csv(const std::vector<TrialRecord>& rows, const std::vector<Index>& k_list);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);
std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& rows, const std::vector<Index>& k_list);

/// Lookup helper: the aggregate row for (D, P, method, metric); throws if absent.
const AggregateRow& find_aggregate(const ExperimentResult& r, Index d, Index p, const std::string& method,
                                   const std::string& metric);

/// Worker count: cfg.threads, else IPMETRIC_THREADS, else the OpenMP default.
int resolve_threads(int requested);

}  // namespace ipm
