#pragma once

// Summaries and comparisons computed from metric rows alone.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedrl/metrics.hpp"

namespace fedrl::experiment {

struct Series {
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const { return x.size(); }
  bool empty() const { return x.empty(); }
};

// Eval rows of one model tag, by round.
inline Series eval_series(const std::vector<RoundRecord>& rows, const std::string& model) {
  Series s;
  for (const auto& r : rows)
    if (r.phase == Phase::kEval && r.model == model) {
      s.x.push_back(r.round);
      s.y.push_back(r.cum_reward);
    }
  return s;
}

// Training reward by cumulative local-epoch count. Rows of several clients
// that reached the same count are averaged.
inline Series train_series(const std::vector<RoundRecord>& rows, const std::string& model) {
  std::map<int, std::pair<double, int>> acc;
  for (const auto& r : rows)
    if (r.phase == Phase::kTrain && r.model == model) {
      auto& [sum, n] = acc[r.episodes];
      sum += r.cum_reward;
      ++n;
    }
  Series s;
  for (const auto& [e, v] : acc) {
    s.x.push_back(e);
    s.y.push_back(v.first / v.second);
  }
  return s;
}

// First round whose reward is within 2% of the series maximum.
inline int convergence_round(const Series& s) {
  if (s.empty()) throw std::invalid_argument("convergence_round: empty series");
  const double peak = *std::max_element(s.y.begin(), s.y.end());
  const double bar = peak - 0.02 * std::abs(peak);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.y[i] >= bar) return static_cast<int>(s.x[i]);
  return static_cast<int>(s.x.back());
}

inline double peak(const Series& s) {
  if (s.empty()) throw std::invalid_argument("peak: empty series");
  return *std::max_element(s.y.begin(), s.y.end());
}

inline double variance(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size());
}

struct SummaryRow {
  std::string algorithm;
  std::string model;
  double cum_reward = 0.0;  // peak validation reward
  int epochs = 0;           // convergence round
  double final_reward = 0.0;
  int rounds = 0;
};

inline SummaryRow summarize(const std::vector<RoundRecord>& rows, const std::string& algorithm,
                            const std::string& model) {
  const Series s = eval_series(rows, model);
  if (s.empty()) throw std::invalid_argument("summarize: no eval rows for model '" + model + "'");
  return {algorithm, model, peak(s), convergence_round(s), s.y.back(), static_cast<int>(s.size())};
}

inline constexpr const char* kSummaryHeader = "algorithm,model,cum_reward,epochs,final_reward,rounds";

inline void write_summary(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << kSummaryHeader << '\n';
  for (const auto& r : rows)
    os << r.algorithm << ',' << r.model << ',' << format_real(r.cum_reward) << ',' << r.epochs
       << ',' << format_real(r.final_reward) << ',' << r.rounds << '\n';
}

struct Comparison {
  std::vector<double> x;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> delta;  // a - b
  double peak_a = 0.0;
  double peak_b = 0.0;
  int convergence_a = 0;
  int convergence_b = 0;
  double dominance = 0.0;  // share of points with a >= b
};

// Point-wise comparison of two series sampled on the same axis.
inline Comparison compare_series(const Series& a, const Series& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("compare: empty series");
  if (a.x != b.x) throw std::invalid_argument("compare: round axes differ");
  Comparison c;
  c.x = a.x;
  c.a = a.y;
  c.b = b.y;
  int wins = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    c.delta.push_back(a.y[i] - b.y[i]);
    if (a.y[i] >= b.y[i]) ++wins;
  }
  c.peak_a = peak(a);
  c.peak_b = peak(b);
  c.convergence_a = convergence_round(a);
  c.convergence_b = convergence_round(b);
  c.dominance = static_cast<double>(wins) / static_cast<double>(a.size());
  return c;
}

// Keeps only the x values present in both series.
inline std::pair<Series, Series> intersect(const Series& a, const Series& b) {
  Series ra, rb;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a.x[i] < b.x[j]) {
      ++i;
    } else if (b.x[j] < a.x[i]) {
      ++j;
    } else {
      ra.x.push_back(a.x[i]);
      ra.y.push_back(a.y[i]);
      rb.x.push_back(b.x[j]);
      rb.y.push_back(b.y[j]);
      ++i;
      ++j;
    }
  }
  return {ra, rb};
}

struct RunComparison {
  Comparison validation;  // eval rows, by round
  Comparison training;    // train rows, by cumulative local epochs
  bool has_training = false;
};

// A is typically a federated run (global / client rows), B a centralized one.
inline RunComparison compare_runs(const std::vector<RoundRecord>& a, const std::string& model_a,
                                  const std::vector<RoundRecord>& b, const std::string& model_b,
                                  const std::string& train_model_a = "client",
                                  const std::string& train_model_b = "center") {
  RunComparison rc;
  rc.validation = compare_series(eval_series(a, model_a), eval_series(b, model_b));
  auto [ta, tb] = intersect(train_series(a, train_model_a), train_series(b, train_model_b));
  if (!ta.empty()) {
    rc.training = compare_series(ta, tb);
    rc.has_training = true;
  }
  return rc;
}

inline void write_comparison_csv(std::ostream& os, const Comparison& c, const char* axis) {
  os << axis << ",a,b,delta\n";
  for (std::size_t i = 0; i < c.x.size(); ++i)
    os << format_real(c.x[i]) << ',' << format_real(c.a[i]) << ',' << format_real(c.b[i]) << ','
       << format_real(c.delta[i]) << '\n';
}

inline void write_comparison_report(std::ostream& os, const RunComparison& rc,
                                    const std::string& label_a, const std::string& label_b) {
  char buf[256];
  auto block = [&](const char* title, const char* axis, const Comparison& c) {
    os << title << '\n';
    std::snprintf(buf, sizeof buf, "  points            %zu\n", c.x.size());
    os << buf;
    std::snprintf(buf, sizeof buf, "  peak A / B        %.4f / %.4f\n", c.peak_a, c.peak_b);
    os << buf;
    std::snprintf(buf, sizeof buf, "  convergence A / B %s %d / %d\n", axis, c.convergence_a,
                  c.convergence_b);
    os << buf;
    std::snprintf(buf, sizeof buf, "  dominance (A>=B)  %.4f\n", c.dominance);
    os << buf;
    os << "  " << axis << "  delta\n";
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      std::snprintf(buf, sizeof buf, "  %6g  %+.4f\n", c.x[i], c.delta[i]);
      os << buf;
    }
  };
  os << "A: " << label_a << "\nB: " << label_b << "\n\n";
  block("validation reward by round", "round", rc.validation);
  if (rc.has_training) {
    os << '\n';
    block("training reward by cumulative local epoch", "epoch", rc.training);
  }
}

}  // namespace fedrl::experiment
