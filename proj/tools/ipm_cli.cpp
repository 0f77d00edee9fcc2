// ipmetric: command-line front end (synth, fit, eval, experiment, ingest, report).

#include "ipm/estimators.hpp"
#include "ipm/evaluation.hpp"
#include "ipm/experiment.hpp"
#include "ipm/ingest.hpp"
#include "ipm/io.hpp"
#include "ipm/report.hpp"
#include "ipm/synthdata.hpp"

#include <CLI11.hpp>

#include <array>
#include <cstdio>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace ipm;

namespace {

// "inst.csv" and "inst" both name the instance stem "inst".
fs::path stem_of(const std::string& path) {
  const std::string suffix = ".csv";
  if (path.size() > suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0)
    return path.substr(0, path.size() - suffix.size());
  return path;
}

void print_kv(const std::string& key, double v) { std::cout << key << " " << io::format_double(v) << "\n"; }

struct SolverFlags {
  int max_iters = SolverConfig{}.max_iters;
  double kkt_tol = SolverConfig{}.kkt_tol;
  double rho = SolverConfig{}.penalty_rho;

  void attach(CLI::App* app) {
    app->add_option("--max-iters", max_iters, "Iteration cap per solve")->capture_default_str();
    app->add_option("--kkt-tol", kkt_tol, "Residual tolerance")->capture_default_str();
    app->add_option("--rho", rho, "Initial penalty")->capture_default_str();
  }
  SolverConfig config() const {
    SolverConfig c;
    c.max_iters = max_iters;
    c.kkt_tol = kkt_tol;
    c.penalty_rho = rho;
    return c;
  }
};

int run_synth(const std::string& out, GenConfig g, Index p) {
  const SyntheticInstance inst = gen_instance(g);
  io::write_instance(out, inst, g);
  if (p > 0) {
    const ComparisonSet omega = sample_comparisons(g.N, p, g.seed);
    const DistanceVector d = all_distances(inst.X, inst.u_true, inst.M_true);
    io::write_comparisons(io::with_suffix(out, ".cmp.csv"), omega, observe(d, omega));
    const Index ties = count_ties(d, omega);
    if (ties > 0) std::cerr << "warning: " << ties << " tied comparisons resolved as +1\n";
  }
  std::cout << "wrote instance " << out << " (D=" << g.D << ", N=" << g.N << ", P=" << p
            << ", rejects=" << inst.rejects << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ideal point and Mahalanobis metric estimation from paired comparisons"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic instance and comparisons");
  GenConfig gen;
  std::string synth_out;
  Index synth_p = 0;
  synth->add_option("--out", synth_out, "Output stem")->required();
  synth->add_option("-D,--dim", gen.D, "Dimension")->capture_default_str();
  synth->add_option("-N,--items", gen.N, "Item count")->capture_default_str();
  synth->add_option("-P,--comparisons", synth_p, "Comparison count (0: none)")->capture_default_str();
  synth->add_option("--seed", gen.seed, "Seed")->capture_default_str();
  synth->add_option("--eps-f", gen.eps_F)->capture_default_str();
  synth->add_option("--eps-s", gen.eps_S)->capture_default_str();
  synth->add_option("--eps-p", gen.eps_P)->capture_default_str();
  synth->add_option("--max-rejects", gen.max_rejects)->capture_default_str();
  synth->add_flag("--identity", gen.identity_metric, "Use M = I");

  // fit
  auto* fit = app.add_subcommand("fit", "Estimate metric and ideal point");
  std::string fit_instance, fit_cmp, fit_out = "fit", fit_method = "single_step";
  RegularizationParams fit_params;
  AlternatingParams fit_alt;
  double fit_lambda = kDefaultEuclideanRidge;
  SolverFlags fit_solver;
  fit->add_option("--instance", fit_instance, "Items CSV (or stem)")->required();
  fit->add_option("--comparisons", fit_cmp, "Comparisons CSV (i,j,y)")->required();
  fit->add_option("--out", fit_out, "Output stem")->capture_default_str();
  fit->add_option("--method", fit_method, "single_step | alternating | euclid_alg1 | euclid_alg2")
      ->check(CLI::IsMember({"single_step", "alternating", "euclid_alg1", "euclid_alg2"}))
      ->capture_default_str();
  std::string fit_preset;
  fit->add_option("--preset", fit_preset, "Named parameter set; explicit --gamma*/--alpha win")
      ->check(CLI::IsMember(preset_names()));
  const std::array<CLI::Option*, 4> fit_param_opts{
      fit->add_option("--gamma1", fit_params.gamma1)->capture_default_str(),
      fit->add_option("--gamma2", fit_params.gamma2)->capture_default_str(),
      fit->add_option("--gamma3", fit_params.gamma3)->capture_default_str(),
      fit->add_option("--alpha", fit_params.alpha)->capture_default_str()};
  fit->add_option("--lambda", fit_lambda, "Ridge for euclid_alg2")->capture_default_str();
  fit->add_option("--max-outer", fit_alt.max_outer, "Alternating stages")->capture_default_str();
  fit->add_option("--alt-tol", fit_alt.estimate_delta.tol, "Stop when ||u change|| < tol")->capture_default_str();
  fit_solver.attach(fit);

  // eval
  auto* eval = app.add_subcommand("eval", "Metrics of an estimate against ground truth");
  std::string eval_truth, eval_est;
  std::vector<Index> eval_k{10};
  eval->add_option("--instance", eval_truth, "Ground-truth instance (stem or items CSV)")->required();
  eval->add_option("--estimate", eval_est, "Estimate stem (from fit)")->required();
  eval->add_option("-K,--top-k", eval_k, "Top-K sizes")->delimiter(',')->capture_default_str();

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run an experiment from a config file");
  std::string exp_config, exp_output;
  int exp_threads = 0, exp_trials = 0;
  exp->add_option("--config", exp_config, "Config file (key = value)")->required();
  exp->add_option("--output", exp_output, "Override the output prefix");
  exp->add_option("--threads", exp_threads, "Worker count (overrides IPMETRIC_THREADS)");
  exp->add_option("--trials", exp_trials, "Override the trial count");
  exp->footer("Config keys:\n" + experiment_config_keys());

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Admissions CSV to instance files");
  std::string ing_unranked, ing_ranked, ing_out, ing_features;
  std::vector<Index> ing_counts{33, 33, 34};
  std::uint64_t ing_seed = 0;
  auto* opt_unranked = ingest->add_option("--unranked", ing_unranked, "Unranked (category) CSV");
  auto* opt_ranked = ingest->add_option("--ranked", ing_ranked, "Ranked (score) CSV");
  opt_unranked->excludes(opt_ranked);
  ingest->add_option("--out", ing_out, "Output stem")->required();
  ingest->add_option("--counts", ing_counts, "fellowship,admit,deny")->delimiter(',')->expected(3)->capture_default_str();
  ingest->add_option("--seed", ing_seed, "Subsampling seed")->capture_default_str();
  ingest->add_option("--features", ing_features, "Comma-separated subset of gre_verbal,gre_quant,gre_writing,gpa,lor");

  // report
  auto* report = app.add_subcommand("report", "Eigenstructure of a fitted metric");
  std::string rep_metric, rep_names;
  EigenReportOptions rep_opts;
  report->add_option("--metric", rep_metric, "Metric CSV")->required();
  report->add_option("--names", rep_names, "Comma-separated feature names")->required();
  report->add_option("--min-loading", rep_opts.min_loading)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : 2;
  }

  try {
    if (*synth) return run_synth(synth_out, gen, synth_p);

    if (*fit) {
      const fs::path stem = stem_of(fit_instance);
      const ItemEmbedding x = io::read_items(io::with_suffix(stem, ".csv"));
      const auto cmp = io::read_comparisons(fit_cmp, x.count());
      const SolverConfig cfg = fit_solver.config();
      if (!fit_preset.empty()) {
        const RegularizationParams p = named_preset(fit_preset);
        const std::array<double, 4> from{p.gamma1, p.gamma2, p.gamma3, p.alpha};
        const std::array<double*, 4> to{&fit_params.gamma1, &fit_params.gamma2, &fit_params.gamma3, &fit_params.alpha};
        for (std::size_t k = 0; k < 4; ++k)
          if (fit_param_opts[k]->count() == 0) *to[k] = from[k];
      }
      Estimate e;
      if (fit_method == "single_step") {
        e = fit_single_step(x, cmp.omega, cmp.y, fit_params, cfg);
      } else if (fit_method == "alternating") {
        fit_alt.ground_truth.reset();
        const AlternatingResult r = fit_alternating(x, cmp.omega, cmp.y, fit_alt, cfg);
        e = r.estimate;
        for (const auto& s : r.trace)
          std::cerr << "stage " << s.stage << " objective " << io::format_double(s.objective) << " u_change "
                    << io::format_double(s.u_change) << " " << to_string(s.status) << "\n";
      } else if (fit_method == "euclid_alg1") {
        e = fit_euclidean_alg1(x, cmp.omega, cmp.y, fit_params, cfg);
      } else {
        e = fit_euclidean_alg2_estimate(x, cmp.omega, cmp.y, fit_lambda, cfg);
      }
      io::write_estimate(fit_out, x, e);
      std::cout << "status " << to_string(e.solver_status) << "\niters " << e.iters << "\nu_hat";
      for (Index k = 0; k < e.u_hat.dim(); ++k) std::cout << " " << io::format_double(e.u_hat.coords(k));
      std::cout << "\nwrote " << fit_out << ".{metric,ideal,ranking}.csv\n";
      return 0;
    }

    if (*eval) {
      const fs::path truth = stem_of(eval_truth);
      const ItemEmbedding x = io::read_items(io::with_suffix(truth, ".csv"));
      const IdealPoint u = io::read_ideal(io::with_suffix(truth, ".ideal.csv"));
      const MetricMatrix m = io::read_metric(io::with_suffix(truth, ".metric.csv"));
      const IdealPoint u_hat = io::read_ideal(io::with_suffix(eval_est, ".ideal.csv"));
      const MetricMatrix m_hat = io::read_metric(io::with_suffix(eval_est, ".metric.csv"));
      const auto est_rank = rank_items(x, u_hat, m_hat);
      const auto true_rank = rank_items(x, u, m);
      print_kv("ur_error", ur_error(u_hat, u, m));
      print_kv("wer_error", wer_error(m, m_hat));
      print_kv("kendall_norm", kendall_tau_norm(est_rank, true_rank));
      for (Index k : eval_k) print_kv("top" + std::to_string(k), topk_fraction(est_rank, true_rank, k));
      return 0;
    }

    if (*exp) {
      ExperimentConfig cfg = load_experiment_config(exp_config);
      if (!exp_output.empty()) cfg.output = exp_output;
      if (exp_threads > 0) cfg.threads = exp_threads;
      if (exp_trials > 0) cfg.trials = exp_trials;
      if (cfg.output.empty()) throw PreconditionError("experiment: no output prefix (config key 'output' or --output)");
      const ExperimentResult r = run_experiment(cfg);
      std::cout << "wrote " << r.trials.size() << " trial rows to " << cfg.output.string() << ".trials.csv\n"
                << "wrote " << r.aggregate.size() << " aggregate rows to " << cfg.output.string()
                << ".aggregate.csv\n";
      return 0;
    }

    if (*ingest) {
      if (ing_unranked.empty() == ing_ranked.empty())
        throw PreconditionError("ingest: exactly one of --unranked or --ranked is required");
      IngestResult r = [&] {
        if (!ing_unranked.empty()) {
          const auto feats = ing_features.empty() ? kUnrankedFeatures : parse_feature_list(ing_features);
          return ingest_unranked(ing_unranked, {ing_counts[0], ing_counts[1], ing_counts[2]}, ing_seed, feats);
        }
        const auto feats = ing_features.empty() ? kRankedFeatures : parse_feature_list(ing_features);
        return ingest_ranked(ing_ranked, feats);
      }();
      for (const auto& d : r.drop_log) std::cerr << "dropped " << d << "\n";
      const Index bad = verify_labels(r.labels, r.omega, r.y);
      if (bad != 0) throw std::runtime_error("ingest: " + std::to_string(bad) + " comparisons contradict labels");
      Matrix items = r.X.items();
      std::vector<std::string> names = r.feature_names;
      std::string out = io::csv_row(names);
      for (Index i = 0; i < items.rows(); ++i) {
        std::vector<std::string> row;
        for (Index c = 0; c < items.cols(); ++c) row.push_back(io::format_double(items(i, c)));
        out += io::csv_row(row);
      }
      io::write_text(io::with_suffix(ing_out, ".csv"), out);
      io::write_comparisons(io::with_suffix(ing_out, ".cmp.csv"), r.omega, r.y);
      std::string labels = "item,id,label\n";
      for (std::size_t i = 0; i < r.ids.size(); ++i)
        labels += std::to_string(i) + "," + io::csv_field(r.ids[i]) + "," + io::format_double(r.labels[i]) + "\n";
      io::write_text(io::with_suffix(ing_out, ".labels.csv"), labels);
      std::cout << "items " << r.X.count() << "\ncomparisons " << r.omega.size() << "\ndropped "
                << r.drop_log.size() << "\n";
      return 0;
    }

    if (*report) {
      const MetricMatrix m = io::read_metric(rep_metric);
      std::vector<std::string> names;
      std::stringstream ss(rep_names);
      for (std::string s; std::getline(ss, s, ',');) names.push_back(s);
      std::cout << render_eigen_report(eigen_report(m, names, rep_opts));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
