#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ermetrics/core.hpp"
#include "ermetrics/report.hpp"

// Ranking comparison across candidate clusterings: evaluate each candidate
// against the same gold standard, rank the candidates under every metric,
// and report metric pairs that disagree about which candidate is better.

namespace ermetrics {

struct RankOptions {
  std::vector<std::string> metrics;  // empty selects all
  UniversePolicy policy = UniversePolicy::Strict;
  double beta = 1.0;
  CostFamily gmd_split = CostFamily::product(1.0);
  CostFamily gmd_merge = CostFamily::product(1.0);
  std::size_t max_examples = 5;  // inversion samples kept per metric pair
};

struct MetricPairStat {
  std::string metric_a, metric_b;
  double tau = 1.0;  // Kendall tau-a over orientation-normalized scores
  std::uint64_t concordant = 0, discordant = 0, ties = 0;
  bool conflict = false;  // at least one strict inversion
  // Candidate pairs (x, y) where metric_a strictly prefers x and
  // metric_b strictly prefers y; capped at max_examples.
  std::vector<std::array<std::string, 2>> examples;

  friend bool operator==(const MetricPairStat&, const MetricPairStat&) = default;
};

struct RankSummary {
  std::vector<std::string> candidates;  // input order
  std::vector<std::string> metrics;     // metrics that ranked every candidate
  std::vector<std::string> skipped;     // metrics null for some candidate
  // values[candidate][metric]; null only for skipped metrics.
  std::map<std::string, std::map<std::string, std::optional<double>>> values;
  std::map<std::string, std::vector<std::string>> order;  // metric -> best first
  std::vector<MetricPairStat> pairs;
  bool any_conflict = false;
};

struct NamedClustering {
  std::string name;
  Clustering clustering;
};

/// Evaluates every candidate against the gold clustering and compares the
/// rankings the metrics induce. Needs at least two candidates with
/// distinct names.
inline RankSummary rank_compare(const Clustering& gold,
                                const std::vector<NamedClustering>& candidates,
                                const RankOptions& options = {}) {
  if (candidates.size() < 2)
    throw Error("rank-compare needs at least two candidates");

  EvalConfig eval_config;
  eval_config.policy = options.policy;
  eval_config.beta = options.beta;
  eval_config.gmd_split = options.gmd_split;
  eval_config.gmd_merge = options.gmd_merge;
  eval_config.metrics = options.metrics;

  RankSummary out;
  std::vector<MetricReport> reports;
  reports.reserve(candidates.size());
  for (const auto& cand : candidates) {
    if (std::find(out.candidates.begin(), out.candidates.end(), cand.name) !=
        out.candidates.end())
      throw Error("duplicate candidate name '" + cand.name + "'");
    out.candidates.push_back(cand.name);
    reports.push_back(evaluate(cand.clustering, gold, eval_config));
  }

  const std::vector<std::string> requested =
      options.metrics.empty() ? all_metric_names() : options.metrics;
  for (const auto& metric : requested) {
    bool complete = true;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      auto v = reports[i].value(metric);
      out.values[candidates[i].name][metric] = v;
      if (!v) complete = false;
    }
    if (complete) out.metrics.push_back(metric);
    else out.skipped.push_back(metric);
  }

  // Normalize so that greater oriented score always means better.
  auto oriented = [&](const std::string& metric, std::size_t i) {
    double v = *reports[i].value(metric);
    return metric_orientation(metric) == "lower" ? -v : v;
  };

  for (const auto& metric : out.metrics) {
    std::vector<std::size_t> idx(candidates.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      double va = oriented(metric, a), vb = oriented(metric, b);
      if (va != vb) return va > vb;
      return candidates[a].name < candidates[b].name;
    });
    auto& order = out.order[metric];
    for (std::size_t i : idx) order.push_back(candidates[i].name);
  }

  for (std::size_t a = 0; a < out.metrics.size(); ++a) {
    for (std::size_t b = a + 1; b < out.metrics.size(); ++b) {
      MetricPairStat stat;
      stat.metric_a = out.metrics[a];
      stat.metric_b = out.metrics[b];
      for (std::size_t x = 0; x < candidates.size(); ++x) {
        for (std::size_t y = x + 1; y < candidates.size(); ++y) {
          const double da = oriented(stat.metric_a, x) - oriented(stat.metric_a, y);
          const double db = oriented(stat.metric_b, x) - oriented(stat.metric_b, y);
          if (da == 0.0 || db == 0.0) {
            stat.ties++;
          } else if ((da > 0.0) == (db > 0.0)) {
            stat.concordant++;
          } else {
            stat.discordant++;
            if (stat.examples.size() < options.max_examples) {
              // Record so that metric_a prefers the first candidate.
              if (da > 0.0)
                stat.examples.push_back({candidates[x].name, candidates[y].name});
              else
                stat.examples.push_back({candidates[y].name, candidates[x].name});
            }
          }
        }
      }
      const std::uint64_t total = stat.concordant + stat.discordant + stat.ties;
      stat.tau = total == 0
                     ? 1.0
                     : (static_cast<double>(stat.concordant) -
                        static_cast<double>(stat.discordant)) /
                           static_cast<double>(total);
      stat.conflict = stat.discordant > 0;
      out.any_conflict |= stat.conflict;
      out.pairs.push_back(std::move(stat));
    }
  }
  return out;
}

inline std::string render_rank_json(const RankSummary& summary) {
  nlohmann::json j;
  j["schemaVersion"] = 1;
  j["candidates"] = summary.candidates;
  j["metrics"] = summary.metrics;
  j["skipped"] = summary.skipped;
  auto values = nlohmann::json::object();
  for (const auto& [candidate, row] : summary.values) {
    auto obj = nlohmann::json::object();
    for (const auto& [metric, v] : row) {
      if (v) obj[metric] = *v;
      else obj[metric] = nullptr;
    }
    values[candidate] = std::move(obj);
  }
  j["values"] = std::move(values);
  auto order = nlohmann::json::object();
  for (const auto& [metric, names] : summary.order) order[metric] = names;
  j["order"] = std::move(order);
  auto pairs = nlohmann::json::array();
  for (const auto& stat : summary.pairs) {
    nlohmann::json p{{"metricA", stat.metric_a},
                     {"metricB", stat.metric_b},
                     {"tau", stat.tau},
                     {"concordant", stat.concordant},
                     {"discordant", stat.discordant},
                     {"ties", stat.ties},
                     {"conflict", stat.conflict}};
    auto examples = nlohmann::json::array();
    for (const auto& ex : stat.examples) examples.push_back({ex[0], ex[1]});
    p["examples"] = std::move(examples);
    pairs.push_back(std::move(p));
  }
  j["pairs"] = std::move(pairs);
  j["anyConflict"] = summary.any_conflict;
  return j.dump(2) + "\n";
}

inline std::string render_rank_table(const RankSummary& summary) {
  std::string out;
  char line[256];
  out += "candidate";
  for (const auto& m : summary.metrics) out += "\t" + m;
  out += "\n";
  for (const auto& candidate : summary.candidates) {
    out += candidate;
    const auto& row = summary.values.at(candidate);
    for (const auto& m : summary.metrics) {
      std::snprintf(line, sizeof(line), "\t%.6f", *row.at(m));
      out += line;
    }
    out += "\n";
  }
  if (!summary.skipped.empty()) {
    out += "skipped (null for some candidate):";
    for (const auto& m : summary.skipped) out += " " + m;
    out += "\n";
  }
  out += "\n";
  for (const auto& stat : summary.pairs) {
    if (!stat.conflict) continue;
    std::snprintf(line, sizeof(line), "conflict: %s vs %s (tau=%.3f, %llu inversions)\n",
                  stat.metric_a.c_str(), stat.metric_b.c_str(), stat.tau,
                  static_cast<unsigned long long>(stat.discordant));
    out += line;
    for (const auto& ex : stat.examples) {
      out += "  " + stat.metric_a + " prefers " + ex[0] + ", " + stat.metric_b +
             " prefers " + ex[1] + "\n";
    }
  }
  if (!summary.any_conflict) out += "no ranking conflicts\n";
  return out;
}

}  // namespace ermetrics
