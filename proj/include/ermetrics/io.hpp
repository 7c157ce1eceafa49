#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "ermetrics/core.hpp"
#include "ermetrics/gmd.hpp"

// Clustering file formats and the textual cost-family spec.
//
//   TSV:  one `record_id<TAB>cluster_id` row per record; `#` lines and
//         blank lines ignored; UTF-8.
//   JSON: {"clusters": {"<label>": ["id", ...], ...}}
//
// Cost specs: `constant:k`, `product:k`, `affine:k1,k2`, `vi`.

namespace ermetrics {

enum class FileFormat { Tsv, Json };

inline std::optional<FileFormat> parse_file_format(std::string_view s) {
  if (s == "tsv") return FileFormat::Tsv;
  if (s == "json") return FileFormat::Json;
  return std::nullopt;
}

namespace detail {

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

}  // namespace detail

inline Clustering parse_clustering_tsv(std::istream& in, const std::string& source) {
  std::vector<Assignment> rows;
  std::unordered_map<std::string, std::pair<std::string, std::size_t>> seen;  // record -> (label, line)
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(source, lineno, "expected record_id<TAB>cluster_id");
    if (line.find('\t', tab + 1) != std::string::npos)
      throw ParseError(source, lineno, "expected exactly 2 tab-separated fields");
    std::string record(trim(std::string_view(line).substr(0, tab)));
    std::string label(trim(std::string_view(line).substr(tab + 1)));
    if (record.empty()) throw ParseError(source, lineno, "empty record id");
    if (label.empty()) throw ParseError(source, lineno, "empty cluster id");
    auto [it, fresh] = seen.try_emplace(record, std::make_pair(label, lineno));
    if (!fresh && it->second.first != label)
      throw ConflictingAssignment(record, it->second.first, label, lineno);
    rows.push_back({std::move(record), std::move(label)});
  }
  return Clustering::from_assignments(rows);
}

inline Clustering parse_clustering_json(std::istream& in, const std::string& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source, 0, e.what());
  }
  if (!doc.is_object() || !doc.contains("clusters") || !doc["clusters"].is_object())
    throw ParseError(source, 0, "expected {\"clusters\": {label: [ids...]}}");
  std::vector<Assignment> rows;
  std::unordered_map<std::string, std::string> seen;
  for (const auto& [label, members] : doc["clusters"].items()) {
    if (!members.is_array())
      throw ParseError(source, 0, "cluster '" + label + "' is not an array");
    for (const auto& m : members) {
      if (!m.is_string())
        throw ParseError(source, 0, "cluster '" + label + "' holds a non-string id");
      std::string record = m.get<std::string>();
      auto [it, fresh] = seen.try_emplace(record, label);
      if (!fresh && it->second != label)
        throw ConflictingAssignment(record, it->second, label);
      rows.push_back({std::move(record), label});
    }
  }
  return Clustering::from_assignments(rows);
}

inline Clustering parse_clustering_stream(std::istream& in, FileFormat format,
                                          const std::string& source) {
  return format == FileFormat::Tsv ? parse_clustering_tsv(in, source)
                                   : parse_clustering_json(in, source);
}

inline Clustering parse_clustering_file(const std::string& path, FileFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return parse_clustering_stream(in, format, path);
}

namespace detail {

/// Cluster labels, de-duplicated for output (empty or repeated labels
/// fall back to cluster<i>).
inline std::vector<std::string> output_labels(const Clustering& c) {
  std::vector<std::string> labels = c.cluster_labels();
  std::unordered_map<std::string, std::size_t> used;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].empty() || !used.try_emplace(labels[i], i).second)
      labels[i] = "cluster" + std::to_string(i);
  }
  return labels;
}

}  // namespace detail

inline void write_clustering_tsv(std::ostream& out, const Clustering& c) {
  auto labels = detail::output_labels(c);
  for (const auto& members : c.member_lists()) {
    for (auto rec : members)
      out << c.tokens()[rec] << '\t' << labels[c.assignments()[rec]] << '\n';
  }
}

inline void write_clustering_json(std::ostream& out, const Clustering& c) {
  auto labels = detail::output_labels(c);
  nlohmann::json clusters = nlohmann::json::object();
  auto members = c.member_lists();
  for (std::size_t j = 0; j < members.size(); ++j) {
    nlohmann::json arr = nlohmann::json::array();
    for (auto rec : members[j]) arr.push_back(c.tokens()[rec]);
    clusters[labels[j]] = std::move(arr);
  }
  out << nlohmann::json{{"clusters", std::move(clusters)}}.dump(2) << '\n';
}

inline void write_clustering_file(const std::string& path, const Clustering& c,
                                  FileFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  if (format == FileFormat::Tsv) write_clustering_tsv(out, c);
  else write_clustering_json(out, c);
}

/// `constant:k` | `product:k` | `affine:k1,k2` | `vi`. vi families come
/// back unbound; gmd() binds them to the evaluated pair's record count.
inline CostFamily parse_cost_spec(std::string_view spec) {
  auto s = trim(spec);
  if (s == "vi") return CostFamily::vi_info(0);
  auto colon = s.find(':');
  if (colon == std::string_view::npos)
    throw Error("bad cost spec '" + std::string(spec) +
                "' (want constant:k, product:k, affine:k1,k2, or vi)");
  auto kind = trim(s.substr(0, colon));
  auto args = s.substr(colon + 1);
  if (kind == "constant") {
    auto k = detail::parse_double(args);
    if (!k || *k < 0) throw Error("bad constant cost '" + std::string(spec) + "'");
    return CostFamily::constant(*k);
  }
  if (kind == "product") {
    auto k = detail::parse_double(args);
    if (!k || *k < 0) throw Error("bad product cost '" + std::string(spec) + "'");
    return CostFamily::product(*k);
  }
  if (kind == "affine") {
    auto comma = args.find(',');
    if (comma == std::string_view::npos)
      throw Error("affine cost needs two constants: '" + std::string(spec) + "'");
    auto k1 = detail::parse_double(args.substr(0, comma));
    auto k2 = detail::parse_double(args.substr(comma + 1));
    if (!k1 || !k2 || *k1 < 0 || *k2 < 0)
      throw Error("bad affine cost '" + std::string(spec) + "'");
    return CostFamily::affine(*k1, *k2);
  }
  throw Error("unknown cost family '" + std::string(kind) + "'");
}

inline std::string format_cost_spec(const CostFamily& f) {
  auto num = [](double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  };
  switch (f.kind()) {
    case CostKind::Constant: return "constant:" + num(f.k1());
    case CostKind::Product: return "product:" + num(f.k2());
    case CostKind::Affine: return "affine:" + num(f.k1()) + "," + num(f.k2());
    case CostKind::ViInfo: return "vi";
  }
  return "?";
}

}  // namespace ermetrics
