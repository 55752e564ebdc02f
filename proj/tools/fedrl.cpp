// fedrl: run federated / centralized epidemic-control experiments.
//
//   fedrl init-config [--out FILE]
//   fedrl train --config FILE [--mode fed|central|both] [--agent a2c] [--seed N] [--out DIR]
//   fedrl plot METRICS.csv... --out DIR
//   fedrl compare A.csv B.csv [--model-a global] [--model-b center] [--out FILE]
//
// FEDRL_OUT_DIR overrides the config's out_dir; --out overrides both.
// Exit status: 0 ok, 1 invalid configuration or arguments, 2 run failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fedrl/fedrl.hpp"

namespace fs = std::filesystem;
using namespace fedrl;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kFailed = 2;

int init_config(const std::string& out) {
  const std::string body = experiment::dump_config(experiment::RunConfig{});
  if (out.empty() || out == "-") {
    std::cout << body;
    return kOk;
  }
  std::ofstream os(out, std::ios::binary);
  if (!os || !(os << body)) {
    std::cerr << "fedrl: cannot write " << out << '\n';
    return kFailed;
  }
  return kOk;
}

struct TrainArgs {
  std::string config;
  std::string mode = "both";
  std::optional<std::string> agent;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool no_checkpoints = false;
};

int train(const TrainArgs& a) {
  experiment::RunConfig cfg;
  experiment::ExperimentOptions opt;
  try {
    if (!a.config.empty()) cfg = experiment::load_config(a.config);
    if (a.agent) {
      const auto kind = agents::parse_agent_kind(*a.agent);
      if (!kind) throw ConfigError("--agent", "unknown algorithm '" + *a.agent + "'");
      cfg.setup.fed.agent = *kind;
    }
    if (a.seed) cfg.setup.fed.master_seed = *a.seed;
    if (const char* env = std::getenv("FEDRL_OUT_DIR"); env && *env) cfg.out_dir = env;
    if (!a.out.empty()) cfg.out_dir = a.out;
    const auto mode = experiment::parse_mode(a.mode);
    if (!mode) throw ConfigError("--mode", "expected fed, central or both");
    opt.mode = *mode;
    opt.checkpoints = !a.no_checkpoints;
    cfg.validate();
  } catch (const ConfigError& e) {
    std::cerr << "fedrl: invalid configuration: " << e.what() << '\n';
    return kInvalid;
  }

  try {
    const auto res = experiment::run_experiment(cfg, opt);
    std::cout << "wrote " << res.dir.string() << '\n';
    experiment::write_summary(std::cout, res.summary);
  } catch (const std::exception& e) {
    std::cerr << "fedrl: run failed: " << e.what() << '\n';
    return kFailed;
  }
  return kOk;
}

std::vector<RoundRecord> load_metrics(const std::string& path) {
  if (!fs::exists(path)) throw std::invalid_argument("metrics file not found: " + path);
  return read_metrics_file(path);
}

int plot(const std::vector<std::string>& files, const std::string& out) {
  try {
    std::vector<experiment::MetricsInput> inputs;
    for (const auto& f : files) inputs.push_back({fs::path(f).stem().string(), load_metrics(f)});
    for (const auto& p : experiment::emit_plots(inputs, out)) std::cout << "wrote " << p.string() << '\n';
  } catch (const std::invalid_argument& e) {
    std::cerr << "fedrl: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "fedrl: plot failed: " << e.what() << '\n';
    return kFailed;
  }
  return kOk;
}

int compare(const std::string& a, const std::string& b, const std::string& model_a,
            const std::string& model_b, const std::string& out) {
  try {
    const auto rc = experiment::compare_runs(load_metrics(a), model_a, load_metrics(b), model_b);
    experiment::write_comparison_report(std::cout, rc, a + " [" + model_a + "]",
                                        b + " [" + model_b + "]");
    if (!out.empty()) {
      std::ofstream os(out, std::ios::binary);
      if (!os) throw std::runtime_error("cannot write " + out);
      experiment::write_comparison_csv(os, rc.validation, "round");
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "fedrl: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "fedrl: compare failed: " << e.what() << '\n';
    return kFailed;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated reinforcement learning for epidemic intervention"};
  app.require_subcommand(1);

  std::string init_out;
  auto* init = app.add_subcommand("init-config", "Print or write the default configuration");
  init->add_option("--out", init_out, "Destination file (default: stdout)");

  TrainArgs ta;
  auto* tr = app.add_subcommand("train", "Run an experiment");
  tr->add_option("--config", ta.config, "JSON configuration file");
  tr->add_option("--mode", ta.mode, "fed, central or both")->check(CLI::IsMember({"fed", "central", "both"}));
  tr->add_option("--agent", ta.agent, "a2c, ppo, ddpg, td3 or random");
  tr->add_option("--seed", ta.seed, "Master seed");
  tr->add_option("--out", ta.out, "Output directory");
  tr->add_flag("--no-checkpoints", ta.no_checkpoints, "Skip per-round checkpoints");

  std::vector<std::string> plot_files;
  std::string plot_out = "plots";
  auto* pl = app.add_subcommand("plot", "Render reward curves from metrics files");
  pl->add_option("metrics", plot_files, "Metrics CSV files")->required();
  pl->add_option("--out", plot_out, "Output directory");

  std::string ca, cb, model_a = "global", model_b = "center", cmp_out;
  auto* cmp = app.add_subcommand("compare", "Compare two metrics files");
  cmp->add_option("a", ca, "Metrics CSV A")->required();
  cmp->add_option("b", cb, "Metrics CSV B")->required();
  cmp->add_option("--model-a", model_a, "Eval model tag in A");
  cmp->add_option("--model-b", model_b, "Eval model tag in B");
  cmp->add_option("--out", cmp_out, "Per-round delta CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  if (*init) return init_config(init_out);
  if (*tr) return train(ta);
  if (*pl) return plot(plot_files, plot_out);
  return compare(ca, cb, model_a, model_b, cmp_out);
}
