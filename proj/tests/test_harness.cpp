#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ipm/estimators.hpp"
#include "ipm/evaluation.hpp"
#include "ipm/experiment.hpp"
#include "ipm/ingest.hpp"
#include "ipm/io.hpp"
#include "ipm/report.hpp"
#include "ipm/rng.hpp"
#include "ipm/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <set>

using namespace ipm;
namespace fs = std::filesystem;

namespace {

const fs::path kData = IPM_TEST_DATA;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ipm_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Trial CSV without its timing column.
std::string strip_wall(std::vector<TrialRecord> rows, const std::vector<Index>& k) {
  for (auto& r : rows) r.wall_ms = 0.0;
  return trials_csv(rows, k);
}

bool has_drop(const IngestResult& r, const std::string& prefix) {
  return std::any_of(r.drop_log.begin(), r.drop_log.end(),
                     [&](const std::string& s) { return s.rfind(prefix, 0) == 0; });
}

}  // namespace

TEST_CASE("config: values, fractions and errors") {
  const auto cfg = parse_experiment_config(R"(
    # comment
    kind = alternating_sweep
    D_list = 2, 3
    N = 30
    P_list = 10,20
    trials = 3
    K_list = 5
    alt.iter.gamma1 = 2/3   # trailing comment
    alt.iter.gamma3 = 7/1500
    alt.stop = estimate_delta
    alt.tol = 1e-2
    base_seed = 99
  )");
  CHECK(cfg.kind == ExperimentKind::AlternatingSweep);
  CHECK(cfg.D_list == std::vector<Index>{2, 3});
  CHECK(cfg.P_list == std::vector<Index>{10, 20});
  CHECK(cfg.alt.iter_params.gamma1 == 2.0 / 3.0);
  CHECK(cfg.alt.iter_params.gamma3 == 7.0 / 1500.0);
  CHECK_FALSE(cfg.alt_ground_truth_stop);
  CHECK(cfg.alt.estimate_delta.tol == 1e-2);
  CHECK(cfg.base_seed == 99);

  CHECK_THROWS_AS(parse_experiment_config("gamma4 = 1"), io::IoError);
  CHECK_THROWS_AS(parse_experiment_config("N = 10\nN = 11"), io::IoError);
  CHECK_THROWS_AS(parse_experiment_config("gamma1 = 1/0"), io::IoError);
  CHECK_THROWS_AS(parse_experiment_config("kind = nope"), io::IoError);
  CHECK_THROWS_AS(parse_experiment_config("N = 5\nP_list = 11"), PreconditionError);
  CHECK_THROWS_AS(parse_experiment_config("gamma2 = -1"), PreconditionError);
}

TEST_CASE("shipped configs parse") {
  for (const char* name : {"single_step_sweep", "euclid_general", "alternating", "euclid_identity"}) {
    CAPTURE(name);
    CHECK_NOTHROW(load_experiment_config(fs::path(IPM_TEST_DATA) / ".." / ".." / "configs" / (std::string(name) + ".cfg")));
  }
}

TEST_CASE("csv parsing") {
  const auto t = io::parse_csv("a,b,c\r\n1,\"x,y\",\"say \"\"hi\"\"\"\r\n,,3\n");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
  CHECK(t.rows[0][1] == "x,y");
  CHECK(t.rows[0][2] == "say \"hi\"");
  CHECK(t.rows[1][0].empty());
  CHECK(t.column("c") == 2);
  CHECK_THROWS_AS(t.column("d"), io::IoError);
  CHECK(io::csv_row({"p", "q,r", "s\"t"}) == "p,\"q,r\",\"s\"\"t\"\n");
  CHECK_THROWS_AS(io::parse_csv("a,b\n1,2,3\n"), io::IoError);
}

TEST_CASE("doubles round-trip through text") {
  Rng rng(5);
  for (int k = 0; k < 200; ++k) {
    const double v = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.below(200)) - 100);
    CHECK(io::parse_double(io::format_double(v), "v") == v);
  }
  CHECK(io::parse_double(io::format_double(0.1), "v") == 0.1);
  CHECK_THROWS_AS(io::parse_double("1.5x", "v"), io::IoError);
  CHECK_THROWS_AS(io::parse_int("", "n"), io::IoError);
}

TEST_CASE("instance, comparisons and estimate round-trip") {
  const fs::path dir = scratch("io");
  GenConfig g;
  g.D = 3;
  g.N = 15;
  g.seed = 8;
  const auto inst = gen_instance(g);
  io::write_instance(dir / "inst", inst, g);
  CHECK(io::read_items(dir / "inst.csv").items() == inst.X.items());
  CHECK(io::read_ideal(dir / "inst.ideal.csv").coords == inst.u_true.coords);
  CHECK(io::read_metric(dir / "inst.metric.csv").matrix() == inst.M_true.matrix());
  const auto manifest = io::parse_key_values(io::read_text(dir / "inst.manifest"));
  CHECK(manifest.at("seed") == "8");

  const auto omega = sample_comparisons(15, 40, 3);
  const auto y = observe(all_distances(inst.X, inst.u_true, inst.M_true), omega);
  io::write_comparisons(dir / "inst.cmp.csv", omega, y);
  const auto back = io::read_comparisons(dir / "inst.cmp.csv", 15);
  CHECK(back.omega.pairs() == omega.pairs());
  CHECK(back.y.values() == y.values());
  CHECK_THROWS_AS(io::read_comparisons(dir / "inst.cmp.csv", 5), std::exception);

  const auto est = fit_single_step(inst.X, omega, y, {}, {});
  io::write_estimate(dir / "est", inst.X, est);
  CHECK(io::read_metric(dir / "est.metric.csv").matrix() == est.M_hat.matrix());
  const auto ranking = io::read_csv(dir / "est.ranking.csv");
  REQUIRE(ranking.rows.size() == 15);
  for (std::size_t r = 0; r < 15; ++r)
    CHECK(io::parse_int(ranking.rows[r][ranking.column("item")], "item") == est.ranking[r]);
  CHECK_THROWS_AS(io::read_items(dir / "missing.csv"), io::IoError);
}

TEST_CASE("experiment smoke run") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::EuclideanComparison;
  cfg.D_list = {2, 3};
  cfg.N = 12;
  cfg.P_list = {10};
  cfg.trials = 1;
  cfg.K_list = {5};
  cfg.output = scratch("exp") / "smoke";
  const auto a = run_experiment(cfg);
  REQUIRE(a.trials.size() == 6);
  for (const char* m : {"single_step", "euclid_alg1", "euclid_alg2"})
    CHECK(std::count_if(a.trials.begin(), a.trials.end(), [&](const TrialRecord& r) { return r.method == m; }) == 2);
  for (const auto& r : a.trials) {
    CHECK(r.wall_ms >= 0.0);
    CHECK(r.topk.count(5) == 1);
  }
  CHECK(fs::exists(io::with_suffix(cfg.output, ".trials.csv")));
  const auto agg = io::read_csv(io::with_suffix(cfg.output, ".aggregate.csv"));
  CHECK(agg.rows.size() == a.aggregate.size());
  // One row per (D, P, method) and metric: ur, wer, kendall, top5, iters.
  CHECK(a.aggregate.size() == 6 * 5);
  const auto& row = find_aggregate(a, 3, 10, "euclid_alg1", "ur_error");
  CHECK(row.n == 1);
  CHECK_THROWS_AS(find_aggregate(a, 4, 10, "euclid_alg1", "ur_error"), std::out_of_range);

  // Reproducible, and independent of the worker count.
  cfg.output.clear();
  cfg.threads = 1;
  const auto b = run_experiment(cfg);
  cfg.threads = 3;
  const auto c = run_experiment(cfg);
  CHECK(strip_wall(a.trials, cfg.K_list) == strip_wall(b.trials, cfg.K_list));
  CHECK(strip_wall(b.trials, cfg.K_list) == strip_wall(c.trials, cfg.K_list));
}

TEST_CASE("aggregate statistics") {
  std::vector<TrialRecord> rows;
  const double ur[] = {0.4, 0.1, 0.3, 0.2};
  const double top[] = {0.6, 0.8, 0.8, 1.0};
  for (int t = 0; t < 4; ++t) {
    TrialRecord r;
    r.D = 2;
    r.P = 10;
    r.method = "single_step";
    r.trial_index = t;
    r.ur_error = ur[t];
    r.topk[5] = top[t];
    rows.push_back(r);
  }
  const auto agg = aggregate(rows, {5});
  const ExperimentResult res{rows, agg};
  const auto& u = find_aggregate(res, 2, 10, "single_step", "ur_error");
  CHECK(u.median == doctest::Approx(0.25));
  CHECK(u.interp_median == u.median);
  CHECK(u.q25 == doctest::Approx(0.175));
  CHECK(u.q75 == doctest::Approx(0.325));
  const auto& k = find_aggregate(res, 2, 10, "single_step", "top5");
  // Two of four values sit at the median class 0.8 with one below.
  CHECK(k.median == doctest::Approx(0.8));
  CHECK(k.interp_median == doctest::Approx(0.7 + 0.2 * (2.0 - 1.0) / 2.0));
}

TEST_CASE("letter score") {
  CHECK(lor_score({3, 3, 3}) == doctest::Approx(std::exp(3.0)).epsilon(1e-15));
  CHECK(lor_score({1, 2}) == doctest::Approx(std::exp(1.5)));
  CHECK_THROWS_AS(lor_score({}), PreconditionError);
  CHECK_THROWS_AS(lor_score({3.5}), PreconditionError);
}

TEST_CASE("ingest unranked fixture") {
  const auto r = ingest_unranked(kData / "admissions_unranked.csv", {}, 1);
  CHECK(r.X.count() == 100);
  CHECK(r.X.dim() == 5);
  CHECK(r.omega.size() == 33 * 33 + 33 * 34 + 33 * 34);
  CHECK(r.omega.size() == 3333);
  CHECK(verify_labels(r.labels, r.omega, r.y) == 0);
  CHECK(r.feature_names == std::vector<std::string>{"gre_verbal", "gre_quant", "gre_writing", "gpa", "lor"});
  for (const char* id : {"x01", "x02", "x03", "x04", "x05", "x06", "x07", "x08", "c017", "c057", "c097"})
    CHECK(has_drop(r, std::string(id) + ":"));
  CHECK(has_drop(r, "x01: gpa 4.7"));

  // Unique ids, and the same selection for the same seed.
  CHECK(std::set<std::string>(r.ids.begin(), r.ids.end()).size() == 100);
  const auto again = ingest_unranked(kData / "admissions_unranked.csv", {}, 1);
  CHECK(again.ids == r.ids);

  // Official scores take precedence over self-reported ones.
  const auto all = ingest_unranked(kData / "admissions_unranked.csv", {39, 0, 0}, 1);
  const auto c001 = std::find(all.ids.begin(), all.ids.end(), "c001") - all.ids.begin();
  REQUIRE(c001 < 39);
  CHECK(all.X.items()(c001, 0) == 163);
  CHECK(all.X.items()(c001, 2) == 4.5);
  CHECK(std::abs(all.X.items()(c001, 4) - std::exp(3.0)) <= 1e-9);

  CHECK_THROWS_AS(ingest_unranked(kData / "admissions_unranked.csv", {60, 0, 0}, 1), PreconditionError);
  const auto sub = ingest_unranked(kData / "admissions_unranked.csv", {5, 5, 5}, 2,
                                   parse_feature_list("gpa,lor"));
  CHECK(sub.X.dim() == 2);
  CHECK(sub.omega.size() == 75);
}

TEST_CASE("ingest ranked fixture") {
  const auto r = ingest_ranked(kData / "admissions_ranked.csv");
  CHECK(r.X.count() == 88);
  CHECK(r.X.dim() == 4);
  CHECK(r.omega.size() == 2610);
  CHECK(verify_labels(r.labels, r.omega, r.y) == 0);
  CHECK_THROWS_AS(ingest_ranked(kData / "admissions_ranked.csv", {Feature::Lor}), io::IoError);
}

TEST_CASE("ingest ranked ties produce no comparison") {
  const fs::path dir = scratch("ties");
  io::write_text(dir / "three.csv",
                 "id,score,gre_writing,gre_verbal,gre_quant,gpa\n"
                 "a,1,4.0,160,160,3.5\n"
                 "b,2,4.0,160,160,3.5\n"
                 "c,2,4.0,160,160,3.5\n");
  const auto r = ingest_ranked(dir / "three.csv");
  CHECK(r.omega.size() == 2);
  for (const auto& p : r.omega.pairs()) CHECK(p.i == 0);
  CHECK(r.y.values() == Vector::Constant(2, -1.0));

  io::write_text(dir / "empty.csv", "id,score,gre_writing,gre_verbal,gre_quant,gpa\n");
  CHECK_THROWS_AS(ingest_ranked(dir / "empty.csv"), io::IoError);
  io::write_text(dir / "noscore.csv", "id,gre_writing,gre_verbal,gre_quant,gpa\na,4,160,160,3\n");
  CHECK_THROWS_AS(ingest_ranked(dir / "noscore.csv"), io::IoError);
}

TEST_CASE("feature lists") {
  CHECK(parse_feature_list("gpa,lor") == std::vector<Feature>{Feature::Gpa, Feature::Lor});
  CHECK_THROWS_AS(parse_feature_list("gpa,gpa"), io::IoError);
  CHECK_THROWS_AS(parse_feature_list("height"), io::IoError);
  CHECK_THROWS_AS(parse_feature_list(""), io::IoError);
}

TEST_CASE("eigen report") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 3.0;
  m(1, 1) = 1.0;
  const auto terms = eigen_report(MetricMatrix(m), {"a", "b"});
  REQUIRE(terms.size() == 2);
  CHECK(terms[0].eigenvalue == doctest::Approx(3.0));
  CHECK(terms[0].loadings == "+1.000 a");
  CHECK(terms[1].loadings == "+1.000 b");

  // Leading loading is always positive; negating a feature flips only its sign.
  Matrix r(2, 2);
  r << 0.8, -0.6, 0.6, 0.8;
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 0.5;
  const Matrix rot = r * d * r.transpose();
  CHECK(eigen_report(MetricMatrix(rot), {"a", "b"})[0].loadings == "+0.800 a + 0.600 b");
  Matrix s = Matrix::Identity(2, 2);
  s(0, 0) = -1.0;
  CHECK(eigen_report(MetricMatrix(s * rot * s), {"a", "b"})[0].loadings == "+0.800 a - 0.600 b");
  CHECK_THROWS_AS(eigen_report(MetricMatrix(m), {"a"}), PreconditionError);
  CHECK(render_eigen_report(terms) == "3\t+1.000 a\n1\t+1.000 b\n");
}

TEST_CASE("named parameter presets") {
  const auto s = named_preset("synthetic");
  CHECK(s.gamma1 == 2.0);
  CHECK(s.gamma3 == 0.001);
  const auto r = named_preset("ranked");
  CHECK(r.gamma1 == doctest::Approx(0.00375));
  CHECK(r.gamma3 == doctest::Approx(6.25e-12));
  CHECK(named_preset("unranked").gamma2 == doctest::Approx(1.0 / 6500.0));
  CHECK(named_preset("ranked_kendall").gamma3 == doctest::Approx(2.0 / 6002.0 * 1e-4));
  for (const auto& name : preset_names()) CHECK_NOTHROW(named_preset(name).validate());
  CHECK_THROWS_AS(named_preset("no_such_preset"), io::IoError);
}
