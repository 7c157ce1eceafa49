#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ermetrics/cluster.hpp"
#include "ermetrics/core.hpp"
#include "ermetrics/gmd.hpp"
#include "ermetrics/info.hpp"
#include "ermetrics/io.hpp"
#include "ermetrics/pairwise.hpp"

// Evaluation pipeline: align, build one contingency table, compute the
// requested metrics from it, and serialize the result. The JSON form
// round-trips losslessly and is byte-stable under render/parse/render.

namespace ermetrics {

struct EvalConfig {
  UniversePolicy policy = UniversePolicy::Strict;
  double beta = 1.0;
  CostFamily gmd_split = CostFamily::product(1.0);
  CostFamily gmd_merge = CostFamily::product(1.0);
  std::vector<std::string> metrics;  // empty selects all
};

inline const std::vector<std::string>& all_metric_names() {
  static const std::vector<std::string> names = {
      "pairwisePrecision", "pairwiseRecall", "pairwiseF1",
      "exactPrecision",    "exactRecall",    "exactF1",
      "ccPrecision",       "ccRecall",       "ccF1",
      "acp",               "aap",            "k",
      "manningPurity",     "homogeneity",    "completeness",
      "vMeasure",          "vi",             "gmd"};
  return names;
}

/// Ranking direction; lower is better only for the two edit distances.
inline std::string_view metric_orientation(std::string_view name) {
  return (name == "vi" || name == "gmd") ? "lower" : "higher";
}

struct ReportEntropies {
  double h_s = 0.0, h_r = 0.0, h_s_given_r = 0.0, h_r_given_s = 0.0;
  friend bool operator==(const ReportEntropies&, const ReportEntropies&) = default;
};

struct MetricReport {
  int schema_version = 1;

  UniversePolicy policy = UniversePolicy::Strict;
  double beta = 1.0;
  std::string gmd_split_spec = "product:1";
  std::string gmd_merge_spec = "product:1";
  std::string entropy_unit = "nats";

  std::uint64_t n = 0;
  std::uint64_t clusters_r = 0, clusters_s = 0;
  std::uint64_t intra_pairs_r = 0, intra_pairs_s = 0;
  std::uint64_t inter_pairs_r = 0, inter_pairs_s = 0;
  std::uint64_t shared_pairs = 0;

  std::map<std::string, std::optional<double>> metrics;  // null = precondition failed
  std::optional<ReportEntropies> entropies;
  std::vector<std::string> flags;  // sorted degenerate/null markers

  bool has_flag(std::string_view f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
  }
  bool any_null() const {
    for (const auto& [_, v] : metrics)
      if (!v) return true;
    return false;
  }
  std::optional<double> value(std::string_view name) const {
    auto it = metrics.find(std::string(name));
    if (it == metrics.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

namespace detail {

inline void add_flag(std::vector<std::string>& flags, std::string f) {
  if (std::find(flags.begin(), flags.end(), f) == flags.end())
    flags.push_back(std::move(f));
}

}  // namespace detail

/// Aligns the pair, builds one Overlap, and evaluates every requested
/// metric from it. A metric whose precondition fails (empty clustering)
/// is reported as null and flagged; the others are still computed.
inline MetricReport evaluate(const Clustering& pred, const Clustering& gold,
                             const EvalConfig& config = {}) {
  std::vector<std::string> requested =
      config.metrics.empty() ? all_metric_names() : config.metrics;
  std::set<std::string> want(requested.begin(), requested.end());
  for (const auto& name : want) {
    const auto& all = all_metric_names();
    if (std::find(all.begin(), all.end(), name) == all.end())
      throw Error("unknown metric '" + name + "'");
  }
  auto wants_any = [&](std::initializer_list<std::string_view> names) {
    for (auto n : names)
      if (want.count(std::string(n))) return true;
    return false;
  };

  const AlignedPair pair = align(pred, gold, config.policy);
  // Per-thread table recycled across calls: evaluation loops reach a
  // zero-allocation steady state instead of paging a fresh workspace
  // in and out of the kernel on every call.
  static thread_local Overlap table;
  table.rebuild(pair);

  MetricReport rep;
  rep.policy = config.policy;
  rep.beta = config.beta;
  rep.gmd_split_spec = format_cost_spec(config.gmd_split);
  rep.gmd_merge_spec = format_cost_spec(config.gmd_merge);
  rep.n = table.n();
  rep.clusters_r = table.row_count();
  rep.clusters_s = table.col_count();
  rep.intra_pairs_r = intra_pair_count(pair.left());
  rep.intra_pairs_s = intra_pair_count(pair.right());
  rep.inter_pairs_r = inter_pair_count(pair.left());
  rep.inter_pairs_s = inter_pair_count(pair.right());
  rep.shared_pairs = shared_pair_count(table);

  auto put = [&](std::string_view name, double v) {
    if (want.count(std::string(name))) rep.metrics[std::string(name)] = v;
  };
  auto put_null = [&](std::string_view name) {
    if (want.count(std::string(name))) rep.metrics[std::string(name)] = std::nullopt;
  };

  if (wants_any({"pairwisePrecision", "pairwiseRecall", "pairwiseF1"})) {
    auto s = pairwise(table);
    put("pairwisePrecision", s.precision);
    put("pairwiseRecall", s.recall);
    put("pairwiseF1", s.f1);
    if (s.degenerate) detail::add_flag(rep.flags, "degenerate:pairwise");
  }
  if (wants_any({"exactPrecision", "exactRecall", "exactF1"})) {
    auto s = exact_cluster(table);
    put("exactPrecision", s.precision);
    put("exactRecall", s.recall);
    put("exactF1", s.f1);
    if (s.degenerate) detail::add_flag(rep.flags, "degenerate:exactCluster");
  }
  if (wants_any({"ccPrecision", "ccRecall", "ccF1"})) {
    if (table.row_count() == 0 || table.col_count() == 0) {
      put_null("ccPrecision");
      put_null("ccRecall");
      put_null("ccF1");
      detail::add_flag(rep.flags, "null:closestCluster");
    } else {
      auto s = closest_cluster(table);
      put("ccPrecision", s.precision);
      put("ccRecall", s.recall);
      put("ccF1", s.f1);
    }
  }
  if (wants_any({"acp", "aap", "k", "manningPurity"})) {
    if (table.n() == 0) {
      put_null("acp");
      put_null("aap");
      put_null("k");
      put_null("manningPurity");
      detail::add_flag(rep.flags, "null:purity");
    } else {
      auto s = purity_family(table);
      put("acp", s.acp);
      put("aap", s.aap);
      put("k", s.k);
      put("manningPurity", s.manning_purity);
    }
  }
  if (wants_any({"homogeneity", "completeness", "vMeasure", "vi"})) {
    if (table.n() == 0) {
      put_null("homogeneity");
      put_null("completeness");
      put_null("vMeasure");
      put_null("vi");
      detail::add_flag(rep.flags, "null:info");
    } else {
      auto s = info_scores(table, config.beta);
      put("homogeneity", s.homogeneity);
      put("completeness", s.completeness);
      put("vMeasure", s.v_measure);
      put("vi", s.vi);
      rep.entropies = ReportEntropies{s.h_s, s.h_r, s.h_s_given_r, s.h_r_given_s};
      if (s.homogeneity == 0.0 && s.completeness == 0.0)
        detail::add_flag(rep.flags, "degenerate:vMeasure");
    }
  }
  if (want.count("gmd"))
    put("gmd", gmd(table, {config.gmd_split, config.gmd_merge}));

  std::sort(rep.flags.begin(), rep.flags.end());
  return rep;
}

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace detail

inline std::string render_report_json(const MetricReport& rep) {
  nlohmann::json j;
  j["schemaVersion"] = rep.schema_version;
  j["config"] = {{"universePolicy", std::string(to_string(rep.policy))},
                 {"beta", rep.beta},
                 {"gmdSplit", rep.gmd_split_spec},
                 {"gmdMerge", rep.gmd_merge_spec},
                 {"entropyUnit", rep.entropy_unit}};
  j["counts"] = {{"n", rep.n},
                 {"clustersR", rep.clusters_r},
                 {"clustersS", rep.clusters_s},
                 {"intraPairsR", rep.intra_pairs_r},
                 {"intraPairsS", rep.intra_pairs_s},
                 {"interPairsR", rep.inter_pairs_r},
                 {"interPairsS", rep.inter_pairs_s},
                 {"sharedPairs", rep.shared_pairs}};
  auto metrics = nlohmann::json::object();
  auto orientations = nlohmann::json::object();
  for (const auto& [name, value] : rep.metrics) {
    if (value) metrics[name] = *value;
    else metrics[name] = nullptr;
    orientations[name] = std::string(metric_orientation(name));
  }
  j["metrics"] = std::move(metrics);
  j["orientations"] = std::move(orientations);
  if (rep.entropies) {
    j["entropies"] = {{"hS", rep.entropies->h_s},
                      {"hR", rep.entropies->h_r},
                      {"hSgivenR", rep.entropies->h_s_given_r},
                      {"hRgivenS", rep.entropies->h_r_given_s}};
  }
  j["flags"] = rep.flags;
  return j.dump(2) + "\n";
}

inline MetricReport parse_report_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("report", 0, e.what());
  }
  try {
    MetricReport rep;
    rep.schema_version = j.at("schemaVersion").get<int>();
    if (rep.schema_version != 1)
      throw Error("unsupported report schemaVersion " + std::to_string(rep.schema_version));
    const auto& cfg = j.at("config");
    auto policy = parse_universe_policy(cfg.at("universePolicy").get<std::string>());
    if (!policy) throw Error("bad universePolicy in report");
    rep.policy = *policy;
    rep.beta = cfg.at("beta").get<double>();
    rep.gmd_split_spec = cfg.at("gmdSplit").get<std::string>();
    rep.gmd_merge_spec = cfg.at("gmdMerge").get<std::string>();
    rep.entropy_unit = cfg.at("entropyUnit").get<std::string>();
    const auto& counts = j.at("counts");
    rep.n = counts.at("n").get<std::uint64_t>();
    rep.clusters_r = counts.at("clustersR").get<std::uint64_t>();
    rep.clusters_s = counts.at("clustersS").get<std::uint64_t>();
    rep.intra_pairs_r = counts.at("intraPairsR").get<std::uint64_t>();
    rep.intra_pairs_s = counts.at("intraPairsS").get<std::uint64_t>();
    rep.inter_pairs_r = counts.at("interPairsR").get<std::uint64_t>();
    rep.inter_pairs_s = counts.at("interPairsS").get<std::uint64_t>();
    rep.shared_pairs = counts.at("sharedPairs").get<std::uint64_t>();
    for (const auto& [name, value] : j.at("metrics").items()) {
      if (value.is_null()) rep.metrics[name] = std::nullopt;
      else rep.metrics[name] = value.get<double>();
    }
    if (j.contains("entropies")) {
      const auto& e = j["entropies"];
      rep.entropies = ReportEntropies{
          e.at("hS").get<double>(), e.at("hR").get<double>(),
          e.at("hSgivenR").get<double>(), e.at("hRgivenS").get<double>()};
    }
    rep.flags = j.at("flags").get<std::vector<std::string>>();
    return rep;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("report", 0, e.what());
  }
}

inline std::string render_report_csv(const MetricReport& rep) {
  auto escape = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
      if (ch == '"') out += "\"\"";
      else out += ch;
    }
    return out + "\"";
  };
  std::string out = "name,value\n";
  auto row = [&](const std::string& name, const std::string& value) {
    out += escape(name) + "," + escape(value) + "\n";
  };
  for (const auto& [name, value] : rep.metrics)
    row(name, value ? detail::format_double(*value) : "");
  row("count.n", std::to_string(rep.n));
  row("count.clustersR", std::to_string(rep.clusters_r));
  row("count.clustersS", std::to_string(rep.clusters_s));
  row("count.intraPairsR", std::to_string(rep.intra_pairs_r));
  row("count.intraPairsS", std::to_string(rep.intra_pairs_s));
  row("count.interPairsR", std::to_string(rep.inter_pairs_r));
  row("count.interPairsS", std::to_string(rep.inter_pairs_s));
  row("count.sharedPairs", std::to_string(rep.shared_pairs));
  if (rep.entropies) {
    row("entropy.hS", detail::format_double(rep.entropies->h_s));
    row("entropy.hR", detail::format_double(rep.entropies->h_r));
    row("entropy.hSgivenR", detail::format_double(rep.entropies->h_s_given_r));
    row("entropy.hRgivenS", detail::format_double(rep.entropies->h_r_given_s));
  }
  for (const auto& f : rep.flags) row("flag." + f, "1");
  row("config.universePolicy", std::string(to_string(rep.policy)));
  row("config.beta", detail::format_double(rep.beta));
  row("config.gmdSplit", rep.gmd_split_spec);
  row("config.gmdMerge", rep.gmd_merge_spec);
  row("config.entropyUnit", rep.entropy_unit);
  row("schemaVersion", std::to_string(rep.schema_version));
  return out;
}

inline std::string render_report_table(const MetricReport& rep) {
  std::string out;
  char line[128];
  out += "metric                 value\n";
  for (const auto& [name, value] : rep.metrics) {
    if (value) std::snprintf(line, sizeof(line), "%-22s %.6f\n", name.c_str(), *value);
    else std::snprintf(line, sizeof(line), "%-22s null\n", name.c_str());
    out += line;
  }
  std::snprintf(line, sizeof(line),
                "\ncounts: n=%llu clustersR=%llu clustersS=%llu\n",
                static_cast<unsigned long long>(rep.n),
                static_cast<unsigned long long>(rep.clusters_r),
                static_cast<unsigned long long>(rep.clusters_s));
  out += line;
  std::snprintf(line, sizeof(line),
                "        intraPairsR=%llu intraPairsS=%llu sharedPairs=%llu\n",
                static_cast<unsigned long long>(rep.intra_pairs_r),
                static_cast<unsigned long long>(rep.intra_pairs_s),
                static_cast<unsigned long long>(rep.shared_pairs));
  out += line;
  std::snprintf(line, sizeof(line),
                "        interPairsR=%llu interPairsS=%llu\n",
                static_cast<unsigned long long>(rep.inter_pairs_r),
                static_cast<unsigned long long>(rep.inter_pairs_s));
  out += line;
  if (rep.entropies) {
    std::snprintf(line, sizeof(line),
                  "entropy (nats): hR=%.6f hS=%.6f hSgivenR=%.6f hRgivenS=%.6f\n",
                  rep.entropies->h_r, rep.entropies->h_s,
                  rep.entropies->h_s_given_r, rep.entropies->h_r_given_s);
    out += line;
  }
  if (!rep.flags.empty()) {
    out += "flags:";
    for (const auto& f : rep.flags) out += " " + f;
    out += "\n";
  }
  out += "config: universe=" + std::string(to_string(rep.policy)) +
         " beta=" + detail::format_double(rep.beta) +
         " gmdSplit=" + rep.gmd_split_spec + " gmdMerge=" + rep.gmd_merge_spec + "\n";
  return out;
}

}  // namespace ermetrics
