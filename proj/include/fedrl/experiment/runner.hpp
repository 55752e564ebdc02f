#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fedrl/experiment/checkpoint.hpp"
#include "fedrl/experiment/config.hpp"
#include "fedrl/experiment/report.hpp"
#include "fedrl/federation.hpp"

namespace fedrl::experiment {

enum class Mode { kFed, kCentral, kBoth };

inline std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "fed") return Mode::kFed;
  if (s == "central") return Mode::kCentral;
  if (s == "both") return Mode::kBoth;
  return std::nullopt;
}

struct ExperimentOptions {
  Mode mode = Mode::kBoth;
  bool checkpoints = true;
};

struct ExperimentResult {
  std::filesystem::path dir;
  std::optional<federation::RunResult> fed;
  std::optional<federation::RunResult> central;
  std::vector<SummaryRow> summary;
};

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os || !(os << body)) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace detail

// Layout under cfg.out_dir:
//   config.json  metrics_fed.csv  metrics_central.csv  summary.csv
//   comparison.txt (mode both)  checkpoints/{fed,central}/round_NNN/
inline ExperimentResult run_experiment(const RunConfig& cfg, const ExperimentOptions& opt = {}) {
  cfg.validate();
  ExperimentResult res;
  res.dir = cfg.out_dir;
  std::filesystem::create_directories(res.dir);
  write_config_echo(cfg, res.dir);

  const auto& setup = cfg.setup;
  const std::string algo(agents::to_string(setup.fed.agent));
  const auto shape = agents::make_agent(setup.fed.agent, setup.agent, 0);
  auto observer = [&](const char* sub) -> federation::RoundObserver {
    if (!opt.checkpoints) return {};
    const auto root = res.dir / "checkpoints" / sub;
    return [root, &shape](const federation::GlobalModel& m) {
      write_checkpoint(root, m.round, *shape, m.params);
    };
  };

  if (opt.mode != Mode::kCentral) {
    res.fed = federation::run_federated(setup, observer("fed"));
    write_metrics_file((res.dir / "metrics_fed.csv").string(), res.fed->records);
    if (setup.fed.global_epochs > 0) res.summary.push_back(summarize(res.fed->records, algo, "global"));
  }
  if (opt.mode != Mode::kFed) {
    res.central = federation::run_centralized(setup, observer("central"));
    write_metrics_file((res.dir / "metrics_central.csv").string(), res.central->records);
    if (setup.fed.global_epochs > 0)
      res.summary.push_back(summarize(res.central->records, algo, "center"));
  }

  std::ostringstream summary;
  write_summary(summary, res.summary);
  detail::write_text(res.dir / "summary.csv", summary.str());

  if (res.fed && res.central && setup.fed.global_epochs > 0) {
    const auto rc = compare_runs(res.fed->records, "global", res.central->records, "center");
    std::ostringstream report;
    write_comparison_report(report, rc, "federated (" + algo + ")", "centralized (" + algo + ")");
    detail::write_text(res.dir / "comparison.txt", report.str());
  }
  return res;
}

}  // namespace fedrl::experiment
