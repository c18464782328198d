// Command-line frontend: covariance construction, two-step optimization,
// baselines, the orthant barrier oracle, and repeated-run studies.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "riskparity/convex_oracle.hpp"
#include "riskparity/data_io.hpp"
#include "riskparity/evolution.hpp"
#include "riskparity/local_search.hpp"
#include "riskparity/risk.hpp"
#include "riskparity/study.hpp"
#include "riskparity/types.hpp"

using nlohmann::json;
using namespace riskparity;

namespace {

constexpr const char* kToolName = "riskparity";
constexpr const char* kToolVersion = "1.0.0";

// Every artifact embeds one of these; together with the input digests it
// pins a run down to the byte.
json make_manifest(const std::string& subcommand, const json& seed,
                   json parameters, json inputs) {
  return json{{"tool", kToolName},     {"version", kToolVersion},
              {"subcommand", subcommand}, {"seed", seed},
              {"parameters", std::move(parameters)},
              {"inputs", std::move(inputs)}};
}

json input_entry(const std::string& path) {
  return json{{"path", path}, {"fnv1a64", digest_file(path)}};
}

void emit_json(const std::string& out_path, const json& doc,
               const std::string& summary) {
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
    std::cout << summary << "\n";
  }
}

std::vector<double> to_vec(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Shared bounds flags: scalars broadcast to every asset unless a JSON file
// ({"lower": [...], "upper": [...]}) supplies per-asset boxes.
struct BoundsArgs {
  double lower = 0.0;
  double upper = 1.0;
  std::string file;

  void attach(CLI::App* cmd) {
    cmd->add_option("--lower", lower, "Lower weight bound for every asset")
        ->capture_default_str();
    cmd->add_option("--upper", upper, "Upper weight bound for every asset")
        ->capture_default_str();
    cmd->add_option("--bounds-file", file,
                    "JSON file with per-asset 'lower' and 'upper' arrays "
                    "(overrides --lower/--upper)");
  }

  Bounds resolve(int n) const {
    Bounds b;
    if (file.empty()) {
      b = Bounds::uniform(n, lower, upper);
    } else {
      json j;
      try {
        j = json::parse(std::ifstream(file));
      } catch (const json::exception& e) {
        throw io_error("cannot parse bounds file '" + file + "': " + e.what());
      }
      if (!j.contains("lower") || !j.contains("upper")) {
        throw io_error("bounds file '" + file +
                       "' needs 'lower' and 'upper' arrays");
      }
      const auto lo = j["lower"].get<std::vector<double>>();
      const auto hi = j["upper"].get<std::vector<double>>();
      if (static_cast<int>(lo.size()) != n || static_cast<int>(hi.size()) != n) {
        throw io_error("bounds file '" + file + "' has " +
                       std::to_string(lo.size()) + "/" +
                       std::to_string(hi.size()) + " entries, expected " +
                       std::to_string(n));
      }
      b.lower = Eigen::Map<const Eigen::VectorXd>(lo.data(), n);
      b.upper = Eigen::Map<const Eigen::VectorXd>(hi.data(), n);
    }
    b.validate();
    return b;
  }

  json describe() const {
    return json{{"lower", lower},
                {"upper", upper},
                {"bounds_file", file.empty() ? json() : json(file)}};
  }
};

// Shared optimizer flags (defaults are the reference configuration).
struct OptimizerArgs {
  std::uint64_t seed = 1;
  std::string fitness = "marginal";
  int ga_pop = 200;
  int ga_iters = 300;
  int ga_elite = 10;
  int ga_random = 50;
  int ga_mutants = 100;
  int ga_crossover = 100;
  double mutation_cap = 0.15;
  std::vector<double> ls_eps{0.01, 0.001};
  int ls_max_steps = 500;

  void attach(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    cmd->add_option("--fitness", fitness, "Risk dispersion measure")
        ->check(CLI::IsMember({"marginal", "total"}))
        ->capture_default_str();
    cmd->add_option("--ga-pop", ga_pop, "Initial population size")
        ->capture_default_str();
    cmd->add_option("--ga-iters", ga_iters, "Number of generations")
        ->capture_default_str();
    cmd->add_option("--ga-elite", ga_elite, "Elites kept per generation")
        ->capture_default_str();
    cmd->add_option("--ga-random", ga_random, "Fresh random members per generation")
        ->capture_default_str();
    cmd->add_option("--ga-mutants", ga_mutants, "Mutants per generation")
        ->capture_default_str();
    cmd->add_option("--ga-crossover", ga_crossover, "Crossover children per generation")
        ->capture_default_str();
    cmd->add_option("--mutation-cap", mutation_cap,
                    "Largest fraction of genes one mutation may touch")
        ->capture_default_str();
    cmd->add_option("--ls-eps", ls_eps,
                    "Local search step sizes, coarse to fine")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--ls-max-steps", ls_max_steps, "Local search steps per phase")
        ->capture_default_str();
  }

  GaConfig ga_config(const Bounds& b) const {
    GaConfig cfg;
    cfg.population_size = ga_pop;
    cfg.max_iterations = ga_iters;
    cfg.n_elite = ga_elite;
    cfg.n_random = ga_random;
    cfg.n_mutants = ga_mutants;
    cfg.n_crossover = ga_crossover;
    cfg.mutation_fraction_cap = mutation_cap;
    cfg.bounds = b;
    cfg.fitness_kind = fitness_kind_from_string(fitness);
    cfg.seed = seed;
    return cfg;
  }

  LsConfig ls_config(const Bounds& b) const {
    LsConfig cfg;
    cfg.epsilons = ls_eps;
    cfg.max_steps = ls_max_steps;
    cfg.bounds = b;
    cfg.fitness_kind = fitness_kind_from_string(fitness);
    return cfg;
  }

  json describe(const BoundsArgs& bounds) const {
    json j = bounds.describe();
    j["fitness"] = fitness;
    j["ga_pop"] = ga_pop;
    j["ga_iters"] = ga_iters;
    j["ga_elite"] = ga_elite;
    j["ga_random"] = ga_random;
    j["ga_mutants"] = ga_mutants;
    j["ga_crossover"] = ga_crossover;
    j["mutation_cap"] = mutation_cap;
    j["ls_eps"] = ls_eps;
    j["ls_max_steps"] = ls_max_steps;
    return j;
  }
};

void write_trace_csv(const std::string& path, const GaResult& result,
                     const std::string& manifest_comment) {
  std::string out = "# manifest: " + manifest_comment + "\n";
  out += "generation,best_fitness,mean_fitness\n";
  for (const auto& s : result.trajectory) {
    out += std::to_string(s.generation) + "," + format_double(s.best_fitness) +
           "," + format_double(s.mean_fitness) + "\n";
  }
  write_text_file(path, out);
}

int run_cov(const std::string& prices_path, const std::string& out_path,
            const std::string& returns_kind) {
  const PriceTable table = load_prices_csv(prices_path);
  const ReturnsMatrix returns =
      compute_returns(table, return_kind_from_string(returns_kind));
  const CovarianceMatrix cov = sample_covariance(returns, table.universe);

  const json manifest = make_manifest(
      "cov", json(),
      json{{"prices", prices_path}, {"out", out_path}, {"returns", returns_kind}},
      json{{"prices", input_entry(prices_path)}});
  save_covariance_csv(out_path, table.universe, cov, manifest.dump());
  std::cout << "covariance " << cov.size() << "x" << cov.size()
            << " written to " << out_path << " ("
            << table.prices.rows() << " rows retained, " << table.dropped_rows
            << " dropped)\n";
  return 0;
}

int run_optimize(const std::string& cov_path, const BoundsArgs& bounds_args,
                 const OptimizerArgs& opt, const std::string& out_path,
                 const std::string& trace_path) {
  const LabeledCovariance input = load_covariance_csv(cov_path);
  const Bounds bounds = bounds_args.resolve(input.cov.size());

  json params = opt.describe(bounds_args);
  params["cov"] = cov_path;
  params["out"] = out_path.empty() ? json() : json(out_path);
  params["trace"] = trace_path.empty() ? json() : json(trace_path);
  const json manifest = make_manifest("optimize", opt.seed, params,
                                      json{{"cov", input_entry(cov_path)}});

  const GaResult evolved = run_ga(input.cov, opt.ga_config(bounds));
  const LsResult refined =
      run_local_search(evolved.best, input.cov, opt.ls_config(bounds));

  if (!trace_path.empty()) {
    write_trace_csv(trace_path, evolved, manifest.dump());
  }
  const json report =
      portfolio_report(input.universe, refined.portfolio, input.cov, manifest);
  std::string summary = "sigma " + format_double(report["sigma"].get<double>()) +
                        ", fitness_" + opt.fitness + " " +
                        format_double(refined.fitness) + ", report written to " +
                        out_path;
  emit_json(out_path, report, summary);
  return 0;
}

int run_baseline(const std::string& cov_path, const std::string& kind,
                 const std::string& out_path) {
  const LabeledCovariance input = load_covariance_csv(cov_path);
  const Eigen::VectorXd weights =
      kind == "mvp" ? mvp_solve(input.cov) : equal_weight(input.cov.size());

  const json manifest = make_manifest(
      "baseline", json(),
      json{{"cov", cov_path},
           {"kind", kind},
           {"out", out_path.empty() ? json() : json(out_path)}},
      json{{"cov", input_entry(cov_path)}});
  const json report =
      portfolio_report(input.universe, weights, input.cov, manifest);
  emit_json(out_path, report,
            kind + " baseline report written to " + out_path);
  return 0;
}

json orthant_entry(const OrthantSolution& sol, const CovarianceMatrix& cov) {
  const Eigen::VectorXd cx = cov.matrix() * sol.raw;
  double residual = 0.0;
  for (int i = 0; i < cov.size(); ++i) {
    residual = std::max(residual, std::abs(sol.raw[i] * cx[i] -
                                           sol.barrier_constant / 2.0));
  }
  return json{{"beta", sol.beta.str()},
              {"raw", to_vec(sol.raw)},
              {"normalizable", sol.normalizable},
              {"normalized", sol.normalizable ? json(to_vec(sol.normalized))
                                              : json()},
              {"barrier_constant", sol.barrier_constant},
              {"stationarity_residual", residual}};
}

int run_oracle(const std::string& cov_path, const std::string& orthant,
               bool enumerate, double c, const std::string& out_path) {
  const LabeledCovariance input = load_covariance_csv(cov_path);

  std::vector<OrthantSolution> solutions;
  if (enumerate) {
    solutions = enumerate_orthants(input.cov, c);
  } else {
    OrthantSignature beta;
    try {
      beta = OrthantSignature::parse(orthant);
    } catch (const std::invalid_argument& e) {
      throw io_error(e.what());
    }
    if (beta.size() != input.cov.size()) {
      throw io_error("orthant signature '" + orthant + "' has " +
                     std::to_string(beta.size()) + " signs, covariance has " +
                     std::to_string(input.cov.size()) + " assets");
    }
    solutions.push_back(solve_orthant(input.cov, beta, c));
  }

  const json manifest = make_manifest(
      "oracle", json(),
      json{{"cov", cov_path},
           {"orthant", enumerate ? json() : json(orthant)},
           {"enumerate", enumerate},
           {"c", c},
           {"out", out_path.empty() ? json() : json(out_path)}},
      json{{"cov", input_entry(cov_path)}});
  json entries = json::array();
  for (const auto& sol : solutions) {
    entries.push_back(orthant_entry(sol, input.cov));
  }
  emit_json(out_path, json{{"config", manifest}, {"solutions", entries}},
            std::to_string(solutions.size()) + " orthant solution(s) written to " +
                out_path);
  return 0;
}

int run_study(const std::string& cov_path, const BoundsArgs& bounds_args,
              const OptimizerArgs& opt, int runs, int threads,
              const std::string& out_path) {
  const LabeledCovariance input = load_covariance_csv(cov_path);
  const Bounds bounds = bounds_args.resolve(input.cov.size());

  json params = opt.describe(bounds_args);
  params["cov"] = cov_path;
  params["runs"] = runs;
  params["threads"] = threads;
  params["out"] = out_path;
  const json manifest = make_manifest("study", opt.seed, params,
                                      json{{"cov", input_entry(cov_path)}});

  const StudyResult result =
      run_study(input.cov, opt.ga_config(bounds), runs, opt.seed, threads);
  write_study_csv(out_path, result, manifest.dump());
  std::cout << "study of " << runs << " runs x " << result.generations
            << " generations written to " << out_path << " (final mean best "
            << format_double(result.mean_best[result.generations - 1]) << ")\n";
  return 0;
}

int run_compare(const std::string& cov_path, const BoundsArgs& bounds_args,
                const OptimizerArgs& opt, int runs, int threads,
                const std::string& out_path) {
  const LabeledCovariance input = load_covariance_csv(cov_path);
  const Bounds bounds = bounds_args.resolve(input.cov.size());

  json params = opt.describe(bounds_args);
  params["cov"] = cov_path;
  params["runs"] = runs;
  params["threads"] = threads;
  params["out"] = out_path.empty() ? json() : json(out_path);
  const json manifest = make_manifest("compare", opt.seed, params,
                                      json{{"cov", input_entry(cov_path)}});

  const CompareResult result =
      compare_methods(input.cov, opt.ga_config(bounds), opt.ls_config(bounds),
                      runs, opt.seed, threads);
  const json doc{{"config", manifest},
                 {"runs", runs},
                 {"t_statistic", result.welch.t_statistic},
                 {"degrees_of_freedom", result.welch.degrees_of_freedom},
                 {"p_value", result.welch.p_value},
                 {"mean_ga_steps", result.welch.mean_a},
                 {"mean_random_steps", result.welch.mean_b},
                 {"ga_steps", result.ga_steps},
                 {"random_steps", result.random_steps},
                 {"ga_final_fitness", result.ga_fitness},
                 {"random_final_fitness", result.random_fitness},
                 {"agree_runs", result.agree_runs}};
  emit_json(out_path, doc,
            "comparison of " + std::to_string(runs) + " paired runs written to " +
                out_path + " (t " + format_double(result.welch.t_statistic) +
                ", p " + format_double(result.welch.p_value) + ")");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-parity portfolio construction: evolutionary search with "
               "local refinement, convex verification oracle, baselines, and "
               "repeated-run studies"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  // cov
  auto* cov_cmd = app.add_subcommand(
      "cov", "Build a sample covariance CSV from a price history CSV");
  std::string cov_prices, cov_out, cov_returns = "simple";
  cov_cmd->add_option("--prices", cov_prices, "Input prices CSV (date,TICKER,...)")
      ->required();
  cov_cmd->add_option("--out", cov_out, "Output covariance CSV")->required();
  cov_cmd->add_option("--returns", cov_returns, "Return convention")
      ->check(CLI::IsMember({"simple", "log"}))
      ->capture_default_str();

  // optimize
  auto* opt_cmd = app.add_subcommand(
      "optimize",
      "Two-step risk-parity optimization: evolutionary search, then "
      "coordinate-wise local refinement");
  std::string opt_cov, opt_out, opt_trace;
  BoundsArgs opt_bounds;
  OptimizerArgs opt_args;
  opt_cmd->add_option("--cov", opt_cov, "Covariance CSV")->required();
  opt_bounds.attach(opt_cmd);
  opt_args.attach(opt_cmd);
  opt_cmd->add_option("--out", opt_out, "Portfolio report JSON (stdout if omitted)");
  opt_cmd->add_option("--trace", opt_trace, "Per-generation trace CSV");

  // baseline
  auto* base_cmd = app.add_subcommand(
      "baseline", "Reference portfolios: minimum variance or equal weight");
  std::string base_cov, base_kind, base_out;
  base_cmd->add_option("--cov", base_cov, "Covariance CSV")->required();
  base_cmd->add_option("--kind", base_kind, "Baseline portfolio")
      ->check(CLI::IsMember({"mvp", "equal"}))
      ->required();
  base_cmd->add_option("--out", base_out, "Report JSON (stdout if omitted)");

  // oracle
  auto* oracle_cmd = app.add_subcommand(
      "oracle",
      "Closed-form-style verification: barrier solutions per sign orthant");
  std::string oracle_cov, oracle_orthant, oracle_out;
  bool oracle_enum = false;
  double oracle_c = 1.0;
  oracle_cmd->add_option("--cov", oracle_cov, "Covariance CSV")->required();
  auto* orthant_opt = oracle_cmd->add_option(
      "--orthant", oracle_orthant, "Sign pattern, e.g. '++-'");
  auto* enum_opt = oracle_cmd->add_flag(
      "--enumerate", oracle_enum, "Solve all 2^n orthants (refused above 20 assets)");
  orthant_opt->excludes(enum_opt);
  oracle_cmd->add_option("--c", oracle_c, "Barrier constant")
      ->capture_default_str();
  oracle_cmd->add_option("--out", oracle_out, "Solutions JSON (stdout if omitted)");

  // study
  auto* study_cmd = app.add_subcommand(
      "study", "Repeated optimizer runs with per-generation quantile bands");
  std::string study_cov, study_out;
  BoundsArgs study_bounds;
  OptimizerArgs study_args;
  int study_runs = 30, study_threads = 0;
  study_cmd->add_option("--cov", study_cov, "Covariance CSV")->required();
  study_cmd->add_option("--runs", study_runs, "Independent runs")
      ->capture_default_str();
  study_cmd->add_option("--threads", study_threads,
                        "Worker cap, 0 = hardware (never changes results)")
      ->capture_default_str();
  study_cmd->add_option("--out", study_out, "Band CSV output")->required();
  study_bounds.attach(study_cmd);
  study_args.attach(study_cmd);

  // compare
  auto* cmp_cmd = app.add_subcommand(
      "compare",
      "Paired runs: local search from an evolved champion vs. from a random "
      "start, Welch-tested on step counts");
  std::string cmp_cov, cmp_out;
  BoundsArgs cmp_bounds;
  OptimizerArgs cmp_args;
  int cmp_runs = 30, cmp_threads = 0;
  cmp_cmd->add_option("--cov", cmp_cov, "Covariance CSV")->required();
  cmp_cmd->add_option("--runs", cmp_runs, "Paired repetitions")
      ->capture_default_str();
  cmp_cmd->add_option("--threads", cmp_threads,
                      "Worker cap, 0 = hardware (never changes results)")
      ->capture_default_str();
  cmp_cmd->add_option("--out", cmp_out, "Result JSON (stdout if omitted)");
  cmp_bounds.attach(cmp_cmd);
  cmp_args.attach(cmp_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad flags are input errors
  }

  try {
    if (cov_cmd->parsed()) return run_cov(cov_prices, cov_out, cov_returns);
    if (opt_cmd->parsed()) {
      return run_optimize(opt_cov, opt_bounds, opt_args, opt_out, opt_trace);
    }
    if (base_cmd->parsed()) return run_baseline(base_cov, base_kind, base_out);
    if (oracle_cmd->parsed()) {
      if (!oracle_enum && oracle_orthant.empty()) {
        throw io_error("oracle needs either --orthant or --enumerate");
      }
      return run_oracle(oracle_cov, oracle_orthant, oracle_enum, oracle_c,
                        oracle_out);
    }
    if (study_cmd->parsed()) {
      return run_study(study_cov, study_bounds, study_args, study_runs,
                       study_threads, study_out);
    }
    if (cmp_cmd->parsed()) {
      return run_compare(cmp_cov, cmp_bounds, cmp_args, cmp_runs, cmp_threads,
                         cmp_out);
    }
  } catch (const guard_error& e) {
    std::cerr << "error (guard): " << e.what() << "\n";
    return 3;
  } catch (const io_error& e) {
    std::cerr << "error (input): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
