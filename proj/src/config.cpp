#include "ipm/experiment.hpp"
#include "ipm/io.hpp"

#include <functional>
#include <sstream>

namespace ipm {

namespace {

using io::IoError;

// Accepts plain decimals and simple fractions such as 2/3 or 1e-3/2.
double parse_number(const std::string& s, const std::string& key) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return io::parse_double(s, key.c_str());
  const double num = io::parse_double(s.substr(0, slash), key.c_str());
  const double den = io::parse_double(s.substr(slash + 1), key.c_str());
  if (den == 0.0) throw IoError(key + ": zero denominator");
  return num / den;
}

std::vector<Index> parse_index_list(const std::string& s, const std::string& key) {
  std::vector<Index> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<Index>(io::parse_int(item, key.c_str())));
  if (out.empty()) throw IoError(key + ": empty list");
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

Setter num(double RegularizationParams::*field, RegularizationParams ExperimentConfig::*params) {
  return [=](ExperimentConfig& c, const std::string& k, const std::string& v) {
    (c.*params).*field = parse_number(v, k);
  };
}

const std::vector<std::pair<std::string, std::pair<std::string, Setter>>>& table() {
  static const std::vector<std::pair<std::string, std::pair<std::string, Setter>>> t = [] {
    std::vector<std::pair<std::string, std::pair<std::string, Setter>>> v;
    auto add = [&](std::string key, std::string doc, Setter s) { v.push_back({key, {doc, std::move(s)}}); };
    add("kind", "single_step_sweep | euclidean_comparison | alternating_sweep | identity_sweep",
        [](auto& c, auto&, auto& s) { c.kind = parse_experiment_kind(s); });
    add("D_list", "comma-separated dimensions", [](auto& c, auto& k, auto& s) { c.D_list = parse_index_list(s, k); });
    add("N", "item count", [](auto& c, auto& k, auto& s) { c.N = static_cast<Index>(io::parse_int(s, k.c_str())); });
    add("P_list", "comma-separated comparison counts", [](auto& c, auto& k, auto& s) { c.P_list = parse_index_list(s, k); });
    add("trials", "trials per (D, P)", [](auto& c, auto& k, auto& s) { c.trials = static_cast<int>(io::parse_int(s, k.c_str())); });
    add("K_list", "top-K sizes", [](auto& c, auto& k, auto& s) { c.K_list = parse_index_list(s, k); });
    add("gamma1", "slack l1 weight", num(&RegularizationParams::gamma1, &ExperimentConfig::params));
    add("gamma2", "metric Frobenius weight", num(&RegularizationParams::gamma2, &ExperimentConfig::params));
    add("gamma3", "distance l2 weight", num(&RegularizationParams::gamma3, &ExperimentConfig::params));
    add("alpha", "ideal-point ridge", num(&RegularizationParams::alpha, &ExperimentConfig::params));
    const std::pair<const char*, double RegularizationParams::*> fields[] = {
        {"gamma1", &RegularizationParams::gamma1},
        {"gamma2", &RegularizationParams::gamma2},
        {"gamma3", &RegularizationParams::gamma3},
        {"alpha", &RegularizationParams::alpha}};
    for (const auto& [name, field] : fields) {
      auto f = field;
      add(std::string("alt.init.") + name, "stage-0 parameter",
          [f](auto& c, auto& k, auto& s) { c.alt.init_params.*f = parse_number(s, k); });
      add(std::string("alt.iter.") + name, "stage k >= 1 parameter",
          [f](auto& c, auto& k, auto& s) { c.alt.iter_params.*f = parse_number(s, k); });
    }
    add("alt.max_outer", "maximum stages", [](auto& c, auto& k, auto& s) { c.alt.max_outer = static_cast<int>(io::parse_int(s, k.c_str())); });
    add("alt.stop", "ground_truth (UR change) | estimate_delta (u change)", [](auto& c, auto& k, auto& s) {
      if (s == "ground_truth") c.alt_ground_truth_stop = true;
      else if (s == "estimate_delta") c.alt_ground_truth_stop = false;
      else throw IoError(k + ": expected ground_truth or estimate_delta");
    });
    add("alt.tol", "stopping tolerance", [](auto& c, auto& k, auto& s) { c.alt.estimate_delta.tol = parse_number(s, k); });
    add("lambda_ridge", "Euclidean Algorithm 2 ridge", [](auto& c, auto& k, auto& s) { c.lambda_ridge = parse_number(s, k); });
    add("solver.max_iters", "iteration cap per solve", [](auto& c, auto& k, auto& s) { c.solver.max_iters = static_cast<int>(io::parse_int(s, k.c_str())); });
    add("solver.kkt_tol", "residual tolerance", [](auto& c, auto& k, auto& s) { c.solver.kkt_tol = parse_number(s, k); });
    add("solver.rho", "initial penalty", [](auto& c, auto& k, auto& s) { c.solver.penalty_rho = parse_number(s, k); });
    add("solver.step_rule", "adaptive | fixed", [](auto& c, auto& k, auto& s) {
      if (s == "adaptive") c.solver.step_rule = StepRule::ResidualBalancing;
      else if (s == "fixed") c.solver.step_rule = StepRule::Fixed;
      else throw IoError(k + ": expected adaptive or fixed");
    });
    add("solver.relaxation", "over-relaxation in (0, 2)", [](auto& c, auto& k, auto& s) { c.solver.relaxation = parse_number(s, k); });
    add("eps_F", "rejection threshold on ||M||_F", [](auto& c, auto& k, auto& s) { c.eps_F = parse_number(s, k); });
    add("eps_S", "rejection threshold on sigma_min(M)", [](auto& c, auto& k, auto& s) { c.eps_S = parse_number(s, k); });
    add("eps_P", "rejection threshold on ||Mu||/||u||", [](auto& c, auto& k, auto& s) { c.eps_P = parse_number(s, k); });
    add("base_seed", "root seed", [](auto& c, auto& k, auto& s) { c.base_seed = static_cast<std::uint64_t>(io::parse_int(s, k.c_str())); });
    add("output", "output prefix", [](auto& c, auto&, auto& s) { c.output = s; });
    add("threads", "worker count (0 = default)", [](auto& c, auto& k, auto& s) { c.threads = static_cast<int>(io::parse_int(s, k.c_str())); });
    return v;
  }();
  return t;
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::SingleStepSweep: return "single_step_sweep";
    case ExperimentKind::EuclideanComparison: return "euclidean_comparison";
    case ExperimentKind::AlternatingSweep: return "alternating_sweep";
    case ExperimentKind::IdentitySweep: return "identity_sweep";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& s) {
  for (auto k : {ExperimentKind::SingleStepSweep, ExperimentKind::EuclideanComparison,
                 ExperimentKind::AlternatingSweep, ExperimentKind::IdentitySweep})
    if (to_string(k) == s) return k;
  throw IoError("unknown experiment kind '" + s + "'");
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw PreconditionError("experiment config: " + what);
  };
  require(trials >= 1, "trials must be >= 1");
  require(N >= 2, "N must be >= 2");
  require(!D_list.empty() && !P_list.empty(), "D_list and P_list must be nonempty");
  for (Index d : D_list) require(d >= 1, "dimensions must be >= 1");
  const Index pairs = N * (N - 1) / 2;
  for (Index p : P_list) require(p >= 1 && p <= pairs, "P_list entries must lie in [1, N(N-1)/2]");
  for (Index k : K_list) require(k >= 1 && k <= N, "K_list entries must lie in [1, N]");
  require(lambda_ridge >= 0.0, "lambda_ridge must be nonnegative");
  require(threads >= 0, "threads must be nonnegative");
  params.validate();
  solver.validate();
  if (kind == ExperimentKind::AlternatingSweep) {
    require(alt.max_outer >= 1, "alt.max_outer must be >= 1");
    require(alt.estimate_delta.tol > 0.0, "alt.tol must be positive");
    alt.init_params.validate();
    alt.iter_params.validate();
  }
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig cfg;
  for (const auto& [key, value] : io::parse_key_values(text)) {
    bool found = false;
    for (const auto& [name, entry] : table()) {
      if (name == key) {
        entry.second(cfg, key, value);
        found = true;
        break;
      }
    }
    if (!found) throw IoError("unknown config key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  try {
    return parse_experiment_config(io::read_text(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string experiment_config_keys() {
  std::string out;
  for (const auto& [name, entry] : table()) out += "  " + name + "  " + entry.first + "\n";
  return out;
}

static const std::vector<std::pair<std::string, RegularizationParams>>& presets() {
  static const std::vector<std::pair<std::string, RegularizationParams>> p{
      {"synthetic", {2.0, 0.002, 0.001, 1.0}},
      {"unranked", {1.0 / 650.0, 1.0 / 6500.0, 2.0 / 65.0 * 1e-6, 1.0}},
      {"ranked", {3.0 / 800.0, 1.0 / 8000.0, 5.0 / 8.0 * 1e-11, 1.0}},
      {"ranked_kendall", {7.0 / 6002.0, 1.0 / 6002.0, 2.0 / 6002.0 * 1e-4, 1.0}}};
  return p;
}

RegularizationParams named_preset(const std::string& name) {
  for (const auto& [n, params] : presets())
    if (n == name) return params;
  throw IoError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& entry : presets()) out.push_back(entry.first);
  return out;
}

}  // namespace ipm
