#pragma once

// Per-round model checkpoints: one binary ParamVector file per network and a
// manifest.json naming the algorithm and each network's shape.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fedrl/agents/factory.hpp"
#include "fedrl/nn/param_vector.hpp"
#include "json.hpp"

namespace fedrl::experiment {

inline const char* to_string(nn::Head h) {
  switch (h) {
    case nn::Head::kLogits: return "logits";
    case nn::Head::kLinear: return "linear";
    case nn::Head::kBounded: return "bounded";
  }
  return "?";
}

struct Checkpoint {
  agents::AgentKind algorithm = agents::AgentKind::kA2C;
  int round = 0;
  std::vector<std::string> names;
  std::vector<nn::ParamVector> params;
};

inline std::filesystem::path round_dir(const std::filesystem::path& root, int round) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "round_%03d", round);
  return root / buf;
}

inline std::filesystem::path write_checkpoint(const std::filesystem::path& root, int round,
                                              const agents::Agent& layout_source,
                                              const std::vector<nn::ParamVector>& params) {
  const auto names = layout_source.network_names();
  const auto specs = layout_source.network_specs();
  if (names.size() != params.size() || specs.size() != params.size())
    throw ContractError("write_checkpoint: network count mismatch");
  const auto dir = round_dir(root, round);
  std::filesystem::create_directories(dir);

  nlohmann::ordered_json manifest{{"algorithm", std::string(agents::to_string(layout_source.kind()))},
                                  {"round", round},
                                  {"networks", nlohmann::ordered_json::array()}};
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::string file = names[i] + ".bin";
    std::ofstream os(dir / file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write checkpoint " + (dir / file).string());
    nn::write_params(os, params[i]);
    manifest["networks"].push_back({{"name", names[i]},
                                    {"file", file},
                                    {"layout", params[i].layout},
                                    {"head", to_string(specs[i].head)},
                                    {"parameters", params[i].size()}});
  }
  std::ofstream ms(dir / "manifest.json", std::ios::binary);
  if (!ms) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  ms << manifest.dump(2) << '\n';
  return dir;
}

inline Checkpoint read_checkpoint(const std::filesystem::path& dir) {
  std::ifstream ms(dir / "manifest.json", std::ios::binary);
  if (!ms) throw std::runtime_error("missing manifest in " + dir.string());
  const auto manifest = nlohmann::json::parse(ms);
  Checkpoint c;
  const auto kind = agents::parse_agent_kind(manifest.at("algorithm").get<std::string>());
  if (!kind) throw std::runtime_error("checkpoint names an unknown algorithm");
  c.algorithm = *kind;
  c.round = manifest.at("round").get<int>();
  for (const auto& n : manifest.at("networks")) {
    std::ifstream is(dir / n.at("file").get<std::string>(), std::ios::binary);
    if (!is) throw std::runtime_error("missing checkpoint file in " + dir.string());
    c.names.push_back(n.at("name").get<std::string>());
    c.params.push_back(nn::read_params(is));
    if (c.params.back().layout != n.at("layout").get<nn::Layout>())
      throw std::runtime_error("checkpoint layout disagrees with its manifest");
  }
  return c;
}

}  // namespace fedrl::experiment
