// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
//   acceptance --workdir DIR [--only 1,2,9]

#include "ipm/estimators.hpp"
#include "ipm/evaluation.hpp"
#include "ipm/experiment.hpp"
#include "ipm/ingest.hpp"
#include "ipm/io.hpp"
#include "ipm/solver.hpp"
#include "ipm/synthdata.hpp"
#include "support/barrier.hpp"
#include "support/oracle.hpp"
#include "support/random.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

using namespace ipm;
namespace fs = std::filesystem;
using testing::all_pairs;
using testing::random_pairs;
using testing::uniform_matrix;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path g_workdir;
const fs::path kConfigDir = IPM_CONFIG_DIR;
const fs::path kData = IPM_TEST_DATA;

ExperimentResult run_config(const std::string& name, const std::string& tag) {
  auto cfg = load_experiment_config(kConfigDir / (name + ".cfg"));
  cfg.output = g_workdir / (name + tag);
  return run_experiment(cfg);
}

// Trial CSV on disk with the wall_ms column removed.
std::string trials_without_wall(const fs::path& prefix) {
  const auto t = io::read_csv(io::with_suffix(prefix, ".trials.csv"));
  const std::size_t wall = t.column("wall_ms");
  auto drop = [&](std::vector<std::string> row) {
    row.erase(row.begin() + static_cast<std::ptrdiff_t>(wall));
    return io::csv_row(row);
  };
  std::string out = drop(t.header);
  for (const auto& r : t.rows) out += drop(r);
  return out;
}

// --- 1: algebraic identities ------------------------------------------------

Outcome identities() {
  Rng rng(101);
  double delta = 0.0, constraint = 0.0, proj = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Index d = 1 + static_cast<Index>(rng.below(5)), n = 2 + static_cast<Index>(rng.below(19));
    const ItemEmbedding x(uniform_matrix(rng, n, d));
    const MetricMatrix m(testing::random_psd(rng, d, d));
    const IdealPoint u(uniform_matrix(rng, d, 1, -1, 1).col(0));
    const Index p = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n * (n - 1) / 2)));
    const ComparisonSet omega(random_pairs(rng, n, p), n);
    const auto ops = build_operators(x, omega);
    const Vector dg = delta_gamma(all_distances(x, u, m), omega);
    const Vector a = a_of_M(ops, m);
    delta = std::max(delta, delta_identity_residual(ops, m, u, x, omega) / std::max(1.0, dg.cwiseAbs().maxCoeff()));
    constraint = std::max(constraint, ops.project_residual(a - dg).cwiseAbs().maxCoeff() /
                                          std::max(1.0, a.cwiseAbs().maxCoeff()));
    const Matrix& pr = ops.proj_residual();
    proj = std::max({proj, (pr * pr - pr).cwiseAbs().maxCoeff(), (pr * ops.R()).cwiseAbs().maxCoeff(),
                     (pr - pr.transpose()).cwiseAbs().maxCoeff()});
  }
  return {delta <= 1e-9 && constraint <= 1e-8 && proj <= 1e-8,
          "delta " + fmt("%.2e", delta) + ", constraint " + fmt("%.2e", constraint) + ", projector " +
              fmt("%.2e", proj)};
}

// --- 2: scale invariance ----------------------------------------------------

Outcome scale_invariance() {
  Rng rng(202);
  double worst = 0.0;
  bool rankings = true;
  for (int t = 0; t < 20; ++t) {
    const Index d = 1 + static_cast<Index>(rng.below(5)), n = 8 + static_cast<Index>(rng.below(13));
    const ItemEmbedding x(uniform_matrix(rng, n, d));
    const MetricMatrix m(testing::random_psd(rng, d, d));
    const IdealPoint u(uniform_matrix(rng, d, 1, -1, 1).col(0));
    const ComparisonSet omega(all_pairs(n), n);
    const auto ops = build_operators(x, omega);
    const Vector dg = delta_gamma(all_distances(x, u, m), omega);
    const auto base = estimate_u_unregularized(m, ops, dg);
    const auto ranking = rank_items(x, base, m);
    for (double c : {1e-3, 1.0, 7.3, 1e3}) {
      const auto scaled = estimate_u_unregularized(m.scaled(c), ops, c * dg);
      worst = std::max(worst, (scaled.coords - base.coords).cwiseAbs().maxCoeff() /
                                  std::max(1.0, base.coords.cwiseAbs().maxCoeff()));
      rankings = rankings && rank_items(x, base, m.scaled(c)) == ranking;
    }
  }
  // Rankings of an actual fit under a rescaled metric.
  const auto inst = gen_instance({.D = 3, .N = 40, .seed = 22});
  const auto omega = sample_comparisons(40, 150, 23);
  const auto y = observe(all_distances(inst.X, inst.u_true, inst.M_true), omega);
  const auto est = fit_single_step(inst.X, omega, y, {}, {});
  for (double c : {1e-3, 1.0, 7.3, 1e3}) rankings = rankings && rank_items(inst.X, est.u_hat, est.M_hat.scaled(c)) == est.ranking;
  return {worst <= 1e-9 && rankings,
          "max u deviation " + fmt("%.2e", worst) + (rankings ? ", rankings identical" : ", rankings differ")};
}

// --- 3: identifiability -----------------------------------------------------

Outcome identifiability() {
  Rng rng(303);
  bool same = true, flagged = true;
  for (int t = 0; t < 10; ++t) {
    const Index d = 2 + static_cast<Index>(rng.below(4)), n = 10;
    const ItemEmbedding x(uniform_matrix(rng, n, d));
    const MetricMatrix m(testing::random_psd(rng, d, d - 1));
    const Vector v = m.eigenvectors().col(d - 1);
    const IdealPoint u(uniform_matrix(rng, d, 1, -1, 1).col(0));
    const IdealPoint moved(u.coords + rng.uniform(0.5, 5.0) * v);
    const ComparisonSet omega(all_pairs(n), n);
    same = same && observe(all_distances(x, u, m), omega).values() ==
                       observe(all_distances(x, moved, m), omega).values();
    flagged = flagged && !identifiability_check(m, 1e-8).identifiable;
  }
  return {same && flagged, std::string(same ? "observations identical" : "observations differ") +
                               (flagged ? ", flagged unidentifiable" : ", not flagged")};
}

// --- 4: solver against references -------------------------------------------

Outcome solver_correctness() {
  Rng rng(404);
  double worst_rel = 0.0, worst_above_sub = -1.0, worst_excess = 0.0;
  const SolverConfig cfg;
  for (int t = 0; t < 20; ++t) {
    const Index d = 1 + t % 3, n = 4 + t % 5;
    const auto inst = gen_instance({.D = d, .N = n, .seed = 4000 + static_cast<std::uint64_t>(t)});
    const ComparisonSet omega(random_pairs(rng, n, std::min<Index>(n * (n - 1) / 2, 2 * n)), n);
    const auto y = observe(all_distances(inst.X, inst.u_true, inst.M_true), omega);
    const auto ops = build_operators(inst.X, omega);
    for (const bool alt : {false, true}) {
      std::optional<Vector> u_prev;
      RegularizationParams params{2.0, 0.002, 0.001, 1.0};
      if (alt) {
        u_prev = inst.u_true.coords + 0.3 * uniform_matrix(rng, d, 1, -1, 1).col(0);
        params = AlternatingParams{}.iter_params;
      }
      const auto sol = alt ? solve_alternating_step(inst.X, omega, y, IdealPoint(*u_prev), params, cfg)
                           : solve_single_step(inst.X, omega, y, params, cfg);
      const testing::OracleProblem prob{inst.X.items(), omega.pairs(), y.values(), params, u_prev};
      const auto ref = testing::barrier_reference(prob);
      const auto sub = testing::subgradient_reference(prob, {20, 25000, 7 + static_cast<std::uint64_t>(t)});
      worst_rel = std::max(worst_rel, std::abs(sol.objective - ref.objective) / std::abs(ref.objective));
      worst_above_sub = std::max(worst_above_sub, (sol.objective - sub.objective) / std::abs(sub.objective));

      Vector c = a_of_M(ops, sol.M_hat) - delta_gamma(sol.d_hat, omega);
      c = alt ? Vector(c - 2.0 * ops.R() * (sol.M_hat.matrix() * *u_prev)) : ops.project_residual(c);
      const auto& lam = sol.M_hat.eigenvalues();
      worst_excess = std::max({worst_excess, (c.cwiseAbs() - sol.zeta_hat).maxCoeff(), -sol.zeta_hat.minCoeff(),
                               -lam(lam.size() - 1)});
    }
  }
  return {worst_rel <= 1e-3 && worst_above_sub <= 1e-3 && worst_excess <= cfg.kkt_tol,
          "rel. gap to barrier " + fmt("%.2e", worst_rel) + ", excess over subgradient " +
              fmt("%.2e", worst_above_sub) + ", infeasibility " + fmt("%.2e", worst_excess)};
}

// --- 5-8: desk-scale experiments --------------------------------------------

Outcome sweep() {
  const auto res = run_config("single_step_sweep", "");
  const auto cfg = load_experiment_config(kConfigDir / "single_step_sweep.cfg");
  bool pass = true;
  std::ostringstream detail;
  for (Index d : cfg.D_list) {
    detail << "D=" << d << " [";
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cfg.P_list.size(); ++k) {
      const double med = find_aggregate(res, d, cfg.P_list[k], "single_step", "ur_error").median;
      detail << (k ? " " : "") << fmt("%.4f", med);
      if (!(med < prev)) {
        pass = false;
        detail << "!";
      }
      prev = med;
    }
    detail << "] ";
  }
  const double ur = find_aggregate(res, 2, 500, "single_step", "ur_error").median;
  const double top = find_aggregate(res, 2, 500, "single_step", "top10").interp_median;
  pass = pass && ur <= 0.05 && top >= 0.8;
  detail << "D=2,P=500 UR " << fmt("%.4f", ur) << " top10 " << fmt("%.3f", top);
  return {pass, detail.str()};
}

Outcome baselines(const std::string& name, bool strict) {
  const auto res = run_config(name, "");
  auto med = [&](const char* m) { return find_aggregate(res, 2, 500, m, "ur_error").median; };
  const double joint = med("single_step"), a1 = med("euclid_alg1"), a2 = med("euclid_alg2");
  const double best = std::min(a1, a2);
  const bool pass = strict ? joint < best : joint <= 2.0 * best;
  return {pass, "P=500 median UR: single_step " + fmt("%.4f", joint) + ", alg1 " + fmt("%.4f", a1) + ", alg2 " +
                    fmt("%.4f", a2)};
}

Outcome alternating_refinement() {
  const auto res = run_config("alternating", "");
  const auto cfg = load_experiment_config(kConfigDir / "alternating.cfg");
  const Index d = cfg.D_list.front();
  bool pass = true;
  std::ostringstream detail;
  for (Index p : cfg.P_list) {
    const double init = find_aggregate(res, d, p, "single_step", "ur_error").median;
    const double fin = find_aggregate(res, d, p, "alternating", "ur_error").median;
    const double gain = 1.0 - fin / init;
    pass = pass && fin <= init;
    if (p == 100) pass = pass && gain >= 0.3;
    detail << "P=" << p << " " << fmt("%.4f", init) << "->" << fmt("%.4f", fin) << " (" << fmt("%.0f", 100 * gain)
           << "%) ";
  }
  return {pass, detail.str()};
}

// --- 9: metric formulas -----------------------------------------------------

Outcome metric_formulas() {
  Rng rng(909);
  const MetricMatrix m(testing::random_psd(rng, 4, 4));
  double wer_scaled = 0.0;
  for (double c : {0.01, 1.0, 42.0}) wer_scaled = std::max(wer_scaled, wer_error(m, m.scaled(c)));
  Matrix a(2, 2), b(2, 2);
  a << 2, 0, 0, 1;
  b << 1, 0, 0, 2;
  const double swapped = wer_error(MetricMatrix(a), MetricMatrix(b));
  bool exact = kendall_tau_norm({0, 1, 2, 3, 4}, {4, 3, 2, 1, 0}) == 1.0 &&
               kendall_tau_norm({0, 1, 2}, {0, 1, 2}) == 0.0 &&
               std::abs(kendall_tau_norm({0, 1, 2}, {1, 0, 2}) - 1.0 / 3.0) <= 1e-15 &&
               topk_fraction({0, 2, 1, 3, 4}, {0, 1, 2, 3, 4}, 2) == 0.5 &&
               std::abs(interpolated_median({0, 1, 1, 1}, 1.0) - 5.0 / 6.0) <= 1e-15 &&
               interpolated_median({0.1, 0.4, 0.2, 0.9, 0.5}, 0.1) == 0.4;
  Vector u(2);
  u << 0.4, -0.7;
  exact = exact && ur_error(IdealPoint(u), IdealPoint(u), MetricMatrix(a)) == 0.0 &&
          std::abs(ur_error(IdealPoint(Vector::Zero(2)), IdealPoint(u), MetricMatrix(a)) - 1.0) <= 1e-15;
  return {wer_scaled <= 1e-12 && swapped == 1.0 && exact,
          "wer(M, cM) " + fmt("%.1e", wer_scaled) + ", swapped " + fmt("%g", swapped) +
              (exact ? ", examples exact" : ", example mismatch")};
}

// --- 10: ingestion ----------------------------------------------------------

Outcome ingestion() {
  const auto u = ingest_unranked(kData / "admissions_unranked.csv", {33, 33, 34}, 1);
  const auto r = ingest_ranked(kData / "admissions_ranked.csv");
  const double lor = std::abs(lor_score({3, 3, 3}) - std::exp(3.0));
  const bool labels = verify_labels(u.labels, u.omega, u.y) == 0 && verify_labels(r.labels, r.omega, r.y) == 0;
  return {u.omega.size() == 3333 && r.omega.size() == 2610 && lor <= 1e-9 && labels,
          "unranked " + std::to_string(u.omega.size()) + ", ranked " + std::to_string(r.omega.size()) +
              ", |lor - e^3| " + fmt("%.1e", lor)};
}

// --- 11: determinism --------------------------------------------------------

Outcome determinism(bool sweep_done) {
  if (!sweep_done) run_config("single_step_sweep", "");
  run_config("single_step_sweep", ".rerun");
  const bool same = trials_without_wall(g_workdir / "single_step_sweep") == trials_without_wall(g_workdir / "single_step_sweep.rerun");
  return {same, same ? "trial CSVs identical apart from wall_ms" : "trial CSVs differ"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("Acceptance checks");
  std::string workdir = "acceptance";
  std::vector<int> only;
  app.add_option("--workdir", workdir, "Directory for experiment outputs")->capture_default_str();
  app.add_option("--only", only, "Criteria to run (default: all)")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  g_workdir = workdir;
  fs::create_directories(g_workdir);

  const std::set<int> selected(only.begin(), only.end());
  bool sweep_done = false;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"algebraic identities", identities},
      {"scale invariance", scale_invariance},
      {"identifiability", identifiability},
      {"solver vs references", solver_correctness},
      {"single-step sweep", [&] {
         sweep_done = true;
         return sweep();
       }},
      {"joint vs euclidean, general metric", [] { return baselines("euclid_general", true); }},
      {"joint vs euclidean, identity metric", [] { return baselines("euclid_identity", false); }},
      {"alternating refinement", alternating_refinement},
      {"metric formulas", metric_formulas},
      {"ingestion", ingestion},
      {"determinism", [&] { return determinism(sweep_done); }},
  };

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += o.pass ? 0 : 1;
    std::printf("criterion %2d %-36s %s  %s  (%.1f s)\n", id, criteria[k].first, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
