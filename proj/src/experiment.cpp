#include "ipm/experiment.hpp"

#include "ipm/evaluation.hpp"
#include "ipm/io.hpp"
#include "ipm/rng.hpp"

#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <exception>

namespace ipm {

namespace {

struct Unit {
  std::size_t d_idx, p_idx;
  int trial;
};

GenConfig gen_config(const ExperimentConfig& cfg, Index d, std::uint64_t seed) {
  GenConfig g;
  g.D = d;
  g.N = cfg.N;
  g.eps_F = cfg.eps_F;
  g.eps_S = cfg.eps_S;
  g.eps_P = cfg.eps_P;
  g.seed = seed;
  g.identity_metric = cfg.kind == ExperimentKind::IdentitySweep;
  return g;
}

TrialRecord score(const ExperimentConfig& cfg, const SyntheticInstance& inst, const std::vector<Index>& truth,
                  const Estimate& e, std::string method) {
  TrialRecord r;
  r.kind = cfg.kind;
  r.D = inst.X.dim();
  r.N = inst.X.count();
  r.seed = inst.seed;
  r.method = std::move(method);
  r.ur_error = ur_error(e.u_hat, inst.u_true, inst.M_true);
  r.wer_error = wer_error(inst.M_true, e.M_hat);
  r.kendall_norm = kendall_tau_norm(e.ranking, truth);
  for (Index k : cfg.K_list) r.topk[k] = topk_fraction(e.ranking, truth, k);
  r.solver_status = e.solver_status;
  r.iters = e.iters;
  return r;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<TrialRecord> run_unit(const ExperimentConfig& cfg, const Unit& u) {
  const Index d = cfg.D_list[u.d_idx];
  const Index p = cfg.P_list[u.p_idx];
  const auto ud = static_cast<std::uint64_t>(d), up = static_cast<std::uint64_t>(p);
  const auto ut = static_cast<std::uint64_t>(u.trial);
  const bool fixed_instance = cfg.kind == ExperimentKind::AlternatingSweep;
  const std::uint64_t inst_seed =
      fixed_instance ? derive_seed(cfg.base_seed, {ud}) : derive_seed(cfg.base_seed, {ud, ut});
  const SyntheticInstance inst = gen_instance(gen_config(cfg, d, inst_seed));
  const std::uint64_t cmp_seed = fixed_instance ? derive_seed(inst_seed, {up, ut}) : derive_seed(inst_seed, {up});
  const ComparisonSet omega = sample_comparisons(cfg.N, p, cmp_seed);
  const DistanceVector dist = all_distances(inst.X, inst.u_true, inst.M_true);
  const Observations y = observe(dist, omega);
  const Index ties = count_ties(dist, omega);
  const std::vector<Index> truth = rank_items(inst.X, inst.u_true, inst.M_true);

  std::vector<TrialRecord> out;
  auto push = [&](TrialRecord r, double ms) {
    r.P = p;
    r.trial_index = u.trial;
    r.ties = ties;
    r.wall_ms = ms;
    out.push_back(std::move(r));
  };
  if (cfg.kind == ExperimentKind::AlternatingSweep) {
    AlternatingParams alt = cfg.alt;
    if (cfg.alt_ground_truth_stop) {
      alt.ground_truth = GroundTruthURDelta{inst.u_true, inst.M_true, cfg.alt.estimate_delta.tol};
    } else {
      alt.ground_truth.reset();
    }
    const auto t0 = std::chrono::steady_clock::now();
    const AlternatingResult res = fit_alternating(inst.X, omega, y, alt, cfg.solver);
    const double ms = elapsed_ms(t0);
    push(score(cfg, inst, truth, res.initial, "single_step"), ms);
    push(score(cfg, inst, truth, res.estimate, "alternating"), ms);
    return out;
  }
  // Each fit runs before its clock is read; argument evaluation order is unspecified.
  auto timed = [&](auto&& fit, const char* method) {
    const auto start = std::chrono::steady_clock::now();
    const Estimate est = fit();
    push(score(cfg, inst, truth, est, method), elapsed_ms(start));
  };
  timed([&] { return fit_single_step(inst.X, omega, y, cfg.params, cfg.solver); }, "single_step");
  if (cfg.kind == ExperimentKind::SingleStepSweep) return out;
  timed([&] { return fit_euclidean_alg1(inst.X, omega, y, cfg.params, cfg.solver); }, "euclid_alg1");
  timed([&] { return fit_euclidean_alg2_estimate(inst.X, omega, y, cfg.lambda_ridge, cfg.solver); },
        "euclid_alg2");
  return out;
}

std::string fmt(double v) { return io::format_double(v); }

}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("IPMETRIC_THREADS")) {
    try {
      const long long n = io::parse_int(env, "IPMETRIC_THREADS");
      if (n > 0) return static_cast<int>(n);
    } catch (const io::IoError&) {
    }
  }
  return omp_get_max_threads();
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<Unit> units;
  for (std::size_t di = 0; di < cfg.D_list.size(); ++di)
    for (std::size_t pi = 0; pi < cfg.P_list.size(); ++pi)
      for (int t = 0; t < cfg.trials; ++t) units.push_back({di, pi, t});

  std::vector<std::vector<TrialRecord>> slots(units.size());
  std::exception_ptr failure;
  const int threads = resolve_threads(cfg.threads);
  const auto n_units = static_cast<long long>(units.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long long k = 0; k < n_units; ++k) {
    try {
      slots[static_cast<std::size_t>(k)] = run_unit(cfg, units[static_cast<std::size_t>(k)]);
    } catch (...) {
#pragma omp critical(ipm_experiment_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult res;
  for (auto& s : slots)
    for (auto& r : s) res.trials.push_back(std::move(r));
  res.aggregate = aggregate(res.trials, cfg.K_list);

  if (!cfg.output.empty()) {
    io::write_text(io::with_suffix(cfg.output, ".trials.csv"), trials_csv(res.trials, cfg.K_list));
    io::write_text(io::with_suffix(cfg.output, ".aggregate.csv"), aggregate_csv(res.aggregate));
  }
  return res;
}

std::vector<std::string> trial_header(const std::vector<Index>& k_list) {
  std::vector<std::string> h{"schema_version", "kind", "D", "N", "P", "trial_index", "seed", "method",
                             "ur_error", "wer_error", "kendall_norm"};
  for (Index k : k_list) h.push_back("top" + std::to_string(k));
  for (const char* c : {"solver_status", "iters", "ties", "wall_ms"}) h.push_back(c);
  return h;
}

std::string trials_csv(const std::vector<TrialRecord>& rows, const std::vector<Index>& k_list) {
  std::string out = io::csv_row(trial_header(k_list));
  for (const auto& r : rows) {
    std::vector<std::string> f{std::to_string(kTrialSchemaVersion), to_string(r.kind), std::to_string(r.D),
                               std::to_string(r.N), std::to_string(r.P), std::to_string(r.trial_index),
                               std::to_string(r.seed), r.method, fmt(r.ur_error), fmt(r.wer_error),
                               fmt(r.kendall_norm)};
    for (Index k : k_list) f.push_back(fmt(r.topk.at(k)));
    f.push_back(to_string(r.solver_status));
    f.push_back(std::to_string(r.iters));
    f.push_back(std::to_string(r.ties));
    f.push_back(fmt(r.wall_ms));
    out += io::csv_row(f);
  }
  return out;
}

std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& rows, const std::vector<Index>& k_list) {
  // Group keys in first-appearance order so the file follows config order.
  struct Group {
    ExperimentKind kind;
    Index d, p;
    std::string method;
    std::vector<const TrialRecord*> members;
  };
  std::vector<Group> groups;
  for (const auto& r : rows) {
    Group* g = nullptr;
    for (auto& cand : groups)
      if (cand.d == r.D && cand.p == r.P && cand.method == r.method) g = &cand;
    if (!g) {
      groups.push_back({r.kind, r.D, r.P, r.method, {}});
      g = &groups.back();
    }
    g->members.push_back(&r);
  }

  std::vector<AggregateRow> out;
  for (const auto& g : groups) {
    auto emit = [&](const std::string& metric, auto getter, double grid) {
      std::vector<double> v;
      for (const auto* r : g.members) v.push_back(getter(*r));
      AggregateRow a;
      a.kind = g.kind;
      a.D = g.d;
      a.P = g.p;
      a.method = g.method;
      a.metric = metric;
      a.n = static_cast<int>(v.size());
      a.median = median(v);
      a.interp_median = grid > 0.0 ? interpolated_median(v, grid) : a.median;
      const auto q = quantiles(v, {0.25, 0.75});
      a.q25 = q[0];
      a.q75 = q[1];
      out.push_back(std::move(a));
    };
    emit("ur_error", [](const TrialRecord& r) { return r.ur_error; }, 0.0);
    emit("wer_error", [](const TrialRecord& r) { return r.wer_error; }, 0.0);
    emit("kendall_norm", [](const TrialRecord& r) { return r.kendall_norm; }, 0.0);
    for (Index k : k_list)
      emit("top" + std::to_string(k), [k](const TrialRecord& r) { return r.topk.at(k); },
           1.0 / static_cast<double>(k));
    emit("iters", [](const TrialRecord& r) { return static_cast<double>(r.iters); }, 0.0);
  }
  return out;
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::string out = io::csv_row(
      {"schema_version", "kind", "D", "P", "method", "metric", "n", "median", "interp_median", "q25", "q75"});
  for (const auto& a : rows)
    out += io::csv_row({std::to_string(kAggregateSchemaVersion), to_string(a.kind), std::to_string(a.D),
                        std::to_string(a.P), a.method, a.metric, std::to_string(a.n), fmt(a.median),
                        fmt(a.interp_median), fmt(a.q25), fmt(a.q75)});
  return out;
}

const AggregateRow& find_aggregate(const ExperimentResult& r, Index d, Index p, const std::string& method,
                                   const std::string& metric) {
  for (const auto& a : r.aggregate)
    if (a.D == d && a.P == p && a.method == method && a.metric == metric) return a;
  throw std::out_of_range("no aggregate row for D=" + std::to_string(d) + " P=" + std::to_string(p) + " " +
                          method + " " + metric);
}

}  // namespace ipm
