#pragma once

// Per-round metric rows and their CSV form:
//   round,model,client_id,phase,cum_reward,episodes
// model is global|center|client, phase is train|eval, client_id is empty for
// rows that do not belong to a client. Rewards are printed with 17
// significant digits so a file round-trips bit-exactly.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedrl {

enum class Phase { kTrain, kEval };

inline const char* to_string(Phase p) { return p == Phase::kTrain ? "train" : "eval"; }

struct RoundRecord {
  int round = 0;
  std::string model;  // global | center | client
  std::optional<int> client_id;
  Phase phase = Phase::kTrain;
  double cum_reward = 0.0;
  // Train rows: the model's cumulative local-epoch count after the episode.
  // Eval rows: how many evaluation episodes were averaged.
  int episodes = 0;

  bool operator==(const RoundRecord&) const = default;
};

inline constexpr const char* kMetricsHeader = "round,model,client_id,phase,cum_reward,episodes";

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_metrics(std::ostream& os, const std::vector<RoundRecord>& rows) {
  os << kMetricsHeader << '\n';
  for (const auto& r : rows) {
    os << r.round << ',' << r.model << ',';
    if (r.client_id) os << *r.client_id;
    os << ',' << to_string(r.phase) << ',' << format_real(r.cum_reward) << ',' << r.episodes
       << '\n';
  }
}

inline std::string metrics_to_string(const std::vector<RoundRecord>& rows) {
  std::ostringstream os;
  write_metrics(os, rows);
  return os.str();
}

inline void write_metrics_file(const std::string& path, const std::vector<RoundRecord>& rows) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open metrics file for writing: " + path);
  write_metrics(os, rows);
  if (!os) throw std::runtime_error("failed writing metrics file: " + path);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

template <typename T>
T parse_number(const std::string& s, std::size_t line_no) {
  T v{};
  if constexpr (std::is_floating_point_v<T>) {
    try {
      std::size_t used = 0;
      v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw std::runtime_error("metrics line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
  } else {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw std::runtime_error("metrics line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  }
  return v;
}

}  // namespace detail

inline std::vector<RoundRecord> read_metrics(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("metrics: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kMetricsHeader) throw std::runtime_error("metrics: unexpected header '" + line + "'");
  std::vector<RoundRecord> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c = detail::split_csv_line(line);
    if (c.size() != 6)
      throw std::runtime_error("metrics line " + std::to_string(line_no) + ": expected 6 fields");
    RoundRecord r;
    r.round = detail::parse_number<int>(c[0], line_no);
    r.model = c[1];
    if (r.model != "global" && r.model != "center" && r.model != "client")
      throw std::runtime_error("metrics line " + std::to_string(line_no) + ": unknown model '" + r.model + "'");
    if (!c[2].empty()) r.client_id = detail::parse_number<int>(c[2], line_no);
    if (c[3] == "train")
      r.phase = Phase::kTrain;
    else if (c[3] == "eval")
      r.phase = Phase::kEval;
    else
      throw std::runtime_error("metrics line " + std::to_string(line_no) + ": unknown phase '" + c[3] + "'");
    r.cum_reward = detail::parse_number<double>(c[4], line_no);
    r.episodes = detail::parse_number<int>(c[5], line_no);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<RoundRecord> read_metrics_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open metrics file: " + path);
  return read_metrics(is);
}

}  // namespace fedrl
