// baycausal command-line interface: simulate, fit, replicate, score.
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "baycausal/io.hpp"

namespace fs = std::filesystem;
using namespace baycausal;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonFlags {
  std::string config;
  std::optional<int> iterations, burn_in, thin, chains;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
};

void add_chain_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "key = value configuration file");
  cmd->add_option("--iterations", f.iterations, "MCMC iterations per chain");
  cmd->add_option("--burn-in", f.burn_in, "burn-in iterations");
  cmd->add_option("--thin", f.thin, "keep every thin-th post-burn-in state");
  cmd->add_option("--chains", f.chains, "number of chains");
  cmd->add_option("--threshold", f.threshold, "edge inclusion threshold");
}

io::RunConfig resolve_config(const CommonFlags& f) {
  io::RunConfig c = f.config.empty() ? io::RunConfig{} : io::read_config(f.config);
  if (f.iterations) c.chain.iterations = *f.iterations;
  if (f.burn_in) c.chain.burn_in = *f.burn_in;
  if (f.thin) c.chain.thin = *f.thin;
  if (f.chains) c.chain.chains = *f.chains;
  if (f.seed) c.chain.seed = *f.seed;
  if (f.threshold) c.threshold = *f.threshold;
  if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) {
    throw ValidationError("threshold must lie in [0, 1]");
  }
  c.chain.validate();
  c.moves.validate();
  return c;
}

CausalParameters scenario_parameters(const std::string& scenario) {
  if (scenario == "I" || scenario == "1") return scenario_one();
  if (scenario == "II" || scenario == "2") return scenario_two();
  return io::read_parameters(scenario);
}

std::string timestamp() {
  const std::time_t t = std::time(nullptr);
  std::ostringstream os;
  os << std::put_time(std::gmtime(&t), "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

class Manifest {
 public:
  Manifest(std::string command, int argc, char** argv)
      : start_(std::chrono::steady_clock::now()) {
    j_["command"] = std::move(command);
    j_["version"] = kVersion;
    j_["started_at"] = timestamp();
    io::Json args = io::Json::array();
    for (int i = 0; i < argc; ++i) args.push_back(argv[i]);
    j_["argv"] = args;
    j_["outputs"] = io::Json::array();
  }
  io::Json& operator[](const char* key) { return j_[key]; }
  void output(const fs::path& p) { j_["outputs"].push_back(p.string()); }
  void write(const fs::path& dir) {
    j_["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const fs::path p = dir / "manifest.json";
    output(p);
    io::write_json(p.string(), j_);
  }

 private:
  io::Json j_;
  std::chrono::steady_clock::time_point start_;
};

io::Json snapshot_json(const io::RunConfig& c) {
  io::Json j = io::Json::object();
  for (const auto& [k, v] : io::config_snapshot(c)) j[k] = v;
  return j;
}

int cmd_simulate(const std::string& scenario, int n, std::uint64_t seed,
                 const fs::path& out, int argc, char** argv) {
  Manifest manifest("simulate", argc, argv);
  const CausalParameters params = scenario_parameters(scenario);
  validate_parameters(params);
  if (n < 1) throw ValidationError("--n must be positive");
  Rng rng(seed);
  const SimulatedData sim = generate_data(params, n, covariates::StandardNormal{}, rng);
  fs::create_directories(out);
  io::write_csv((out / "data.csv").string(), sim.data);
  io::write_json((out / "truth.json").string(), io::to_json(sim.truth));
  manifest.output(out / "data.csv");
  manifest.output(out / "truth.json");
  manifest["scenario"] = scenario;
  manifest["n"] = n;
  manifest["seed"] = seed;
  manifest.write(out);
  std::cout << "wrote " << n << " observations of " << sim.data.Q()
            << " primary variables and " << sim.data.S() << " covariates to "
            << out.string() << "\n";
  return 0;
}

int cmd_fit(const std::string& data_path, const CommonFlags& flags, bool binary,
            const fs::path& out, int argc, char** argv) {
  Manifest manifest("fit", argc, argv);
  const io::RunConfig cfg = resolve_config(flags);
  const Dataset data = io::read_csv(data_path);
  validate_dataset(data);
  const std::vector<ChainResult> chains =
      run_chains(data, cfg.hyper, cfg.chain, cfg.moves, cfg.options);
  fs::create_directories(out);
  const fs::path samples = out / (binary ? "samples.bin" : "samples.ndjson");
  if (binary) io::write_samples_binary(samples.string(), chains);
  else io::write_samples_ndjson(samples.string(), chains);
  manifest.output(samples);

  const DiagnosticsReport diag = diagnostics(chains);
  io::write_json((out / "diagnostics.json").string(), io::to_json(diag));
  manifest.output(out / "diagnostics.json");
  if (chains.front().samples.empty()) {
    std::cerr << "no retained samples (burn-in equals iterations); "
                 "summary and graph not written\n";
  } else {
    const PosteriorSummary summary = summarize(chains);
    const GraphEstimate graph = extract_graph(summary, cfg.threshold);
    io::write_json((out / "summary.json").string(), io::to_json(summary));
    io::write_json((out / "graph.json").string(), io::to_json(graph));
    manifest.output(out / "summary.json");
    manifest.output(out / "graph.json");
    std::cout << "edges among primary variables: " << graph.b_edges.count()
              << ", modal number of confounders: " << graph.p_star << "\n";
  }
  manifest["data"] = data_path;
  manifest["config"] = snapshot_json(cfg);
  manifest["seed"] = cfg.chain.seed;
  manifest.write(out);
  return 0;
}

int cmd_replicate(const std::string& scenario, int n, int replicates,
                  const CommonFlags& flags, const fs::path& out, int argc,
                  char** argv) {
  Manifest manifest("replicate", argc, argv);
  const io::RunConfig cfg = resolve_config(flags);
  ReplicateConfig rc;
  rc.scenario = scenario;
  rc.truth = scenario_parameters(scenario);
  rc.n = n;
  rc.replicates = replicates;
  rc.seed = cfg.chain.seed;
  rc.chain = cfg.chain;
  rc.moves = cfg.moves;
  rc.options = cfg.options;
  rc.hyper = cfg.hyper;
  rc.threshold = cfg.threshold;
  if (n < 1) throw ValidationError("--n must be positive");
  if (replicates < 0) throw ValidationError("--replicates must be non-negative");
  const RecoveryReport report = run_replicates(rc);
  for (const auto& rep : report.replicates) {
    if (!rep.ok) {
      std::cerr << "warning: replicate " << rep.index << " failed: " << rep.error << "\n";
    }
  }
  fs::create_directories(out);
  io::write_json((out / "report.json").string(), io::to_json(report));
  const std::string table = format_table(report);
  {
    std::ofstream os(out / "table.txt");
    os << table;
  }
  manifest.output(out / "report.json");
  manifest.output(out / "table.txt");
  manifest["scenario"] = scenario;
  manifest["n"] = n;
  manifest["replicates"] = replicates;
  manifest["config"] = snapshot_json(cfg);
  manifest["seed"] = cfg.chain.seed;
  manifest.write(out);
  std::cout << table;
  return 0;
}

int cmd_score(const std::string& estimate_path, const std::string& truth_path) {
  const Support est = io::read_b_support(estimate_path);
  const Support truth = io::read_b_support(truth_path);
  const EdgeScore s = score_graph(est, truth);
  std::cout << std::fixed << std::setprecision(4) << "TPR " << s.tpr << "\nFDR "
            << s.fdr << "\nMCC " << s.mcc << "\nexact " << (s.exact ? "yes" : "no")
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian causal discovery for linear models with cycles and latent confounders"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string scenario = "I";
  int n = 1000;
  std::uint64_t seed = 1;
  std::string out = "out";
  auto* sim = app.add_subcommand("simulate", "draw a dataset from a scenario or parameter file");
  sim->add_option("--scenario", scenario, "I, II or a parameter JSON file");
  sim->add_option("--n", n, "number of observations");
  sim->add_option("--seed", seed, "random seed");
  sim->add_option("--out", out, "output directory");

  CommonFlags fit_flags;
  std::string data_path;
  bool binary = false;
  auto* fit = app.add_subcommand("fit", "run the sampler on a CSV dataset");
  fit->add_option("data", data_path, "CSV file with Y<k> and X<k> columns")->required();
  add_chain_flags(fit, fit_flags);
  fit->add_option("--seed", fit_flags.seed, "random seed");
  fit->add_option("--out", out, "output directory");
  fit->add_flag("--binary-samples", binary, "write samples.bin instead of samples.ndjson");

  CommonFlags rep_flags;
  int replicates = 1;
  auto* rep = app.add_subcommand("replicate", "repeat simulate + fit + score");
  rep->add_option("--scenario", scenario, "I, II or a parameter JSON file");
  rep->add_option("--n", n, "observations per replicate");
  rep->add_option("--replicates", replicates, "number of replicates");
  add_chain_flags(rep, rep_flags);
  rep->add_option("--seed", rep_flags.seed, "random seed");
  rep->add_option("--out", out, "output directory");

  std::string estimate_path, truth_path;
  auto* score = app.add_subcommand("score", "compare an estimated graph with the truth");
  score->add_option("estimate", estimate_path, "graph.json or support JSON")->required();
  score->add_option("truth", truth_path, "truth.json or support JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sim) return cmd_simulate(scenario, n, seed, out, argc, argv);
    if (*fit) return cmd_fit(data_path, fit_flags, binary, out, argc, argv);
    if (*rep) return cmd_replicate(scenario, n, replicates, rep_flags, out, argc, argv);
    if (*score) return cmd_score(estimate_path, truth_path);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ChainFailure& e) {
    std::cerr << "numerical failure at iteration " << e.iteration() << ": " << e.what()
              << "\nstate:\n" << e.dump() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
