#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ermetrics/core.hpp"
#include "ermetrics/errors.hpp"
#include "ermetrics/io.hpp"

// Synthetic clusterings and seeded perturbations. Everything here is
// deterministic for a given seed: random draws go through one explicit
// rejection-style bounded sampler on mt19937_64 rather than
// std::uniform_int_distribution, whose output is not pinned by the
// standard and differs across library implementations.

namespace ermetrics {

namespace detail {

/// Uniform draw from [0, bound) without implementation-defined behavior.
inline std::uint64_t bounded_rand(std::mt19937_64& rng, std::uint64_t bound) {
  // Rejection sampling over the top of the range keeps the draw unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % bound;
}

template <typename T>
void shuffle_values(std::vector<T>& values, std::mt19937_64& rng) {
  for (std::size_t i = values.size(); i > 1; --i)
    std::swap(values[i - 1], values[bounded_rand(rng, i)]);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Random partitions

struct SizeProfile {
  enum class Kind { Uniform, Zipf, SingletonHeavy };
  Kind kind = Kind::Uniform;
  std::uint64_t uniform_size = 4;  // Uniform: records per cluster
  double zipf_exponent = 1.5;      // Zipf: weight of size k is k^-s

  static SizeProfile uniform(std::uint64_t size) {
    if (size == 0) throw Error("uniform cluster size must be positive");
    return {Kind::Uniform, size, 0.0};
  }
  static SizeProfile zipf(double exponent) {
    if (!(exponent > 0.0)) throw Error("zipf exponent must be positive");
    return {Kind::Zipf, 0, exponent};
  }
  static SizeProfile singleton_heavy() { return {Kind::SingletonHeavy, 0, 0.0}; }
};

/// Parses "uniform:K", "zipf:S", or "singleton-heavy".
inline SizeProfile parse_size_profile(std::string_view text) {
  std::string s(trim(text));
  if (s == "singleton-heavy") return SizeProfile::singleton_heavy();
  auto colon = s.find(':');
  if (colon == std::string::npos)
    throw Error("bad size profile '" + s + "' (want uniform:K, zipf:S, or singleton-heavy)");
  std::string head = s.substr(0, colon), arg = s.substr(colon + 1);
  if (head == "uniform") {
    auto k = detail::parse_double(arg);
    if (!k || *k < 1.0 || *k != std::floor(*k))
      throw Error("bad uniform cluster size '" + arg + "'");
    return SizeProfile::uniform(static_cast<std::uint64_t>(*k));
  }
  if (head == "zipf") {
    auto e = detail::parse_double(arg);
    if (!e || !(*e > 0.0)) throw Error("bad zipf exponent '" + arg + "'");
    return SizeProfile::zipf(*e);
  }
  throw Error("bad size profile '" + s + "'");
}

namespace detail {

/// Draws cluster sizes summing to exactly n under the given profile.
inline std::vector<std::uint64_t> draw_sizes(std::uint64_t n, const SizeProfile& profile,
                                             std::mt19937_64& rng) {
  std::vector<std::uint64_t> sizes;
  std::uint64_t left = n;
  switch (profile.kind) {
    case SizeProfile::Kind::Uniform:
      while (left > 0) {
        std::uint64_t take = std::min<std::uint64_t>(profile.uniform_size, left);
        sizes.push_back(take);
        left -= take;
      }
      break;
    case SizeProfile::Kind::Zipf: {
      // Inverse-CDF over sizes 1..min(n, 10000); the truncation keeps the
      // CDF table small while still producing heavy-tailed cluster sizes.
      const std::uint64_t max_size = std::min<std::uint64_t>(n, 10000);
      std::vector<double> cdf(max_size);
      double total = 0.0;
      for (std::uint64_t k = 1; k <= max_size; ++k) {
        total += std::pow(static_cast<double>(k), -profile.zipf_exponent);
        cdf[k - 1] = total;
      }
      while (left > 0) {
        const double u = (static_cast<double>(rng() >> 11) * 0x1.0p-53) * total;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::uint64_t size = static_cast<std::uint64_t>(it - cdf.begin()) + 1;
        sizes.push_back(std::min<std::uint64_t>(size, left));
        left -= sizes.back();
      }
      break;
    }
    case SizeProfile::Kind::SingletonHeavy:
      // 90% singletons, the rest uniform on 2..20.
      while (left > 0) {
        std::uint64_t size = 1;
        if (bounded_rand(rng, 10) == 0) size = 2 + bounded_rand(rng, 19);
        sizes.push_back(std::min<std::uint64_t>(size, left));
        left -= sizes.back();
      }
      break;
  }
  return sizes;
}

}  // namespace detail

/// Random partition of records r0..r{n-1} into clusters c0..c{k-1} with
/// sizes drawn from the profile and membership shuffled uniformly.
inline Clustering random_partition(std::uint64_t n, const SizeProfile& profile,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto sizes = detail::draw_sizes(n, profile, rng);

  std::vector<std::string> tokens(n);
  for (std::uint64_t i = 0; i < n; ++i) tokens[i] = "r" + std::to_string(i);

  std::vector<RecordIndex> order(n);
  std::iota(order.begin(), order.end(), RecordIndex{0});
  detail::shuffle_values(order, rng);

  std::vector<RecordIndex> cluster_of(n);
  std::vector<std::string> labels(sizes.size());
  std::uint64_t next = 0;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    labels[c] = "c" + std::to_string(c);
    for (std::uint64_t k = 0; k < sizes[c]; ++k)
      cluster_of[order[next++]] = static_cast<RecordIndex>(c);
  }
  return Clustering::from_dense(std::move(tokens), std::move(cluster_of), std::move(labels));
}

// ---------------------------------------------------------------------------
// Perturbation ops

/// One applied edit. Ops are recorded concretely (by record token and
/// label) so a log replays exactly regardless of internal ordering.
struct PerturbOp {
  enum class Kind { Split, Merge, Move };
  Kind kind = Kind::Split;
  std::string cluster_a;               // split: source; merge: kept; move: source
  std::string cluster_b;               // merge: absorbed; move: destination label
  std::vector<std::string> moved_out;  // split: records sent to the new cluster; move: one record
  std::string new_label;               // split / move-to-new: label of the created cluster

  friend bool operator==(const PerturbOp&, const PerturbOp&) = default;
};

inline std::string_view to_string(PerturbOp::Kind k) {
  switch (k) {
    case PerturbOp::Kind::Split: return "split";
    case PerturbOp::Kind::Merge: return "merge";
    case PerturbOp::Kind::Move: return "move";
  }
  return "split";
}

inline std::optional<PerturbOp::Kind> parse_op_kind(std::string_view s) {
  if (s == "split") return PerturbOp::Kind::Split;
  if (s == "merge") return PerturbOp::Kind::Merge;
  if (s == "move") return PerturbOp::Kind::Move;
  return std::nullopt;
}

struct PerturbationLog {
  std::uint64_t seed = 0;
  std::vector<PerturbOp> ops;

  friend bool operator==(const PerturbationLog&, const PerturbationLog&) = default;
};

struct OpMix {
  std::uint64_t split = 1, merge = 1, move = 1;
};

/// Parses "split:A,merge:B,move:C" (any subset, any order; missing kinds
/// get weight 0).
inline OpMix parse_op_mix(std::string_view text) {
  OpMix mix{0, 0, 0};
  std::string s(trim(text));
  if (s.empty()) throw Error("empty op mix");
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto comma = s.find(',', pos);
    std::string part(trim(s.substr(pos, comma == std::string::npos ? comma : comma - pos)));
    auto colon = part.find(':');
    if (colon == std::string::npos)
      throw Error("bad op mix term '" + part + "' (want kind:weight)");
    auto kind = parse_op_kind(trim(part.substr(0, colon)));
    auto weight = detail::parse_double(part.substr(colon + 1));
    if (!kind || !weight || *weight < 0.0 || *weight != std::floor(*weight))
      throw Error("bad op mix term '" + part + "'");
    auto w = static_cast<std::uint64_t>(*weight);
    switch (*kind) {
      case PerturbOp::Kind::Split: mix.split = w; break;
      case PerturbOp::Kind::Merge: mix.merge = w; break;
      case PerturbOp::Kind::Move: mix.move = w; break;
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (mix.split + mix.merge + mix.move == 0)
    throw Error("op mix has no positive weight");
  return mix;
}

namespace detail {

/// Mutable clustering state used while applying ops: member lists plus
/// labels, cheap to split/merge/move on.
struct EditState {
  std::vector<std::string> tokens;
  std::vector<std::vector<RecordIndex>> members;
  std::vector<std::string> labels;

  static EditState from(const Clustering& c) {
    EditState st;
    st.tokens.assign(c.tokens().begin(), c.tokens().end());
    st.members = c.member_lists();
    st.labels.assign(c.cluster_labels().begin(), c.cluster_labels().end());
    return st;
  }

  std::optional<std::size_t> find_label(std::string_view label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return i;
    return std::nullopt;
  }

  Clustering to_clustering() const {
    std::vector<RecordIndex> cluster_of(tokens.size());
    for (std::size_t c = 0; c < members.size(); ++c)
      for (RecordIndex r : members[c]) cluster_of[r] = static_cast<RecordIndex>(c);
    return Clustering::from_dense(tokens, cluster_of, labels);
  }
};

/// Applies one recorded op. Throws Error if the op does not fit the
/// current state (stale log, wrong base clustering).
inline void apply_op(EditState& st, const PerturbOp& op) {
  auto index_of_token = [&](const std::string& token) -> RecordIndex {
    for (std::size_t i = 0; i < st.tokens.size(); ++i)
      if (st.tokens[i] == token) return static_cast<RecordIndex>(i);
    throw Error("perturbation log references unknown record '" + token + "'");
  };
  auto erase_member = [](std::vector<RecordIndex>& v, RecordIndex r) {
    auto it = std::find(v.begin(), v.end(), r);
    if (it == v.end()) throw Error("perturbation log does not match the clustering");
    v.erase(it);
  };
  switch (op.kind) {
    case PerturbOp::Kind::Split: {
      auto a = st.find_label(op.cluster_a);
      if (!a || op.moved_out.empty() || op.moved_out.size() >= st.members[*a].size())
        throw Error("split op does not match the clustering");
      std::vector<RecordIndex> out;
      for (const auto& token : op.moved_out) {
        RecordIndex r = index_of_token(token);
        erase_member(st.members[*a], r);
        out.push_back(r);
      }
      st.members.push_back(std::move(out));
      st.labels.push_back(op.new_label);
      break;
    }
    case PerturbOp::Kind::Merge: {
      auto a = st.find_label(op.cluster_a), b = st.find_label(op.cluster_b);
      if (!a || !b || *a == *b) throw Error("merge op does not match the clustering");
      auto& into = st.members[*a];
      auto& from = st.members[*b];
      into.insert(into.end(), from.begin(), from.end());
      st.members.erase(st.members.begin() + static_cast<std::ptrdiff_t>(*b));
      st.labels.erase(st.labels.begin() + static_cast<std::ptrdiff_t>(*b));
      break;
    }
    case PerturbOp::Kind::Move: {
      if (op.moved_out.size() != 1) throw Error("move op does not match the clustering");
      auto a = st.find_label(op.cluster_a);
      if (!a) throw Error("move op does not match the clustering");
      RecordIndex r = index_of_token(op.moved_out[0]);
      erase_member(st.members[*a], r);
      if (!op.new_label.empty()) {
        st.members.push_back({r});
        st.labels.push_back(op.new_label);
      } else {
        auto b = st.find_label(op.cluster_b);
        if (!b) throw Error("move op does not match the clustering");
        st.members[*b].push_back(r);
      }
      if (st.members[*a].empty()) {
        st.members.erase(st.members.begin() + static_cast<std::ptrdiff_t>(*a));
        st.labels.erase(st.labels.begin() + static_cast<std::ptrdiff_t>(*a));
      }
      break;
    }
  }
}

}  // namespace detail

struct PerturbResult {
  Clustering clustering;
  PerturbationLog log;
};

/// Applies `op_count` random edits drawn from the mix. Each applied op is
/// recorded concretely, so replaying the log on the same base clustering
/// reproduces the result exactly. Throws Unsatisfiable when no op with
/// positive weight is applicable (e.g. only splits requested but every
/// cluster is a singleton).
inline PerturbResult perturb(const Clustering& base, std::uint64_t op_count,
                             const OpMix& mix, std::uint64_t seed) {
  if (base.record_count() == 0) throw EmptyClustering("perturb");
  auto st = detail::EditState::from(base);
  std::mt19937_64 rng(seed);
  PerturbationLog log;
  log.seed = seed;

  std::uint64_t fresh = 0;  // counter for generated cluster labels
  auto fresh_label = [&] {
    std::string label;
    do {
      label = "~p" + std::to_string(fresh++);
    } while (st.find_label(label));
    return label;
  };

  for (std::uint64_t done = 0; done < op_count; ++done) {
    // An op kind drawn from the mix may be inapplicable (split needs a
    // cluster of size >= 2, merge needs two clusters, move needs either);
    // drop such kinds and redraw rather than skipping the op.
    std::uint64_t w_split = mix.split, w_merge = mix.merge, w_move = mix.move;
    bool can_split = false;
    for (const auto& m : st.members) can_split |= m.size() >= 2;
    const bool can_merge = st.members.size() >= 2;
    if (!can_split) w_split = 0;
    if (!can_merge) w_merge = 0;
    if (!can_split && !can_merge) w_move = 0;  // a move would be a no-op
    const std::uint64_t total = w_split + w_merge + w_move;
    if (total == 0)
      throw Unsatisfiable("no applicable perturbation op (clustering too small for the mix)");

    std::uint64_t pick = detail::bounded_rand(rng, total);
    PerturbOp op;
    if (pick < w_split) {
      op.kind = PerturbOp::Kind::Split;
      std::vector<std::size_t> eligible;
      for (std::size_t c = 0; c < st.members.size(); ++c)
        if (st.members[c].size() >= 2) eligible.push_back(c);
      std::size_t c = eligible[detail::bounded_rand(rng, eligible.size())];
      // Send a uniform nonempty proper subset to the new cluster: each
      // member joins with p=1/2, redrawing the all-or-nothing outcomes.
      std::vector<std::string> out;
      while (out.empty() || out.size() == st.members[c].size()) {
        out.clear();
        for (RecordIndex r : st.members[c])
          if (detail::bounded_rand(rng, 2) == 1) out.push_back(st.tokens[r]);
      }
      op.cluster_a = st.labels[c];
      op.moved_out = std::move(out);
      op.new_label = fresh_label();
    } else if (pick < w_split + w_merge) {
      op.kind = PerturbOp::Kind::Merge;
      std::size_t a = detail::bounded_rand(rng, st.members.size());
      std::size_t b = detail::bounded_rand(rng, st.members.size() - 1);
      if (b >= a) ++b;
      op.cluster_a = st.labels[a];
      op.cluster_b = st.labels[b];
    } else {
      op.kind = PerturbOp::Kind::Move;
      // A move needs a real change: either another cluster to land in, or
      // a source of size >= 2 so that moving out to a new cluster splits it.
      std::vector<std::size_t> eligible;
      for (std::size_t c = 0; c < st.members.size(); ++c)
        if (st.members.size() >= 2 || st.members[c].size() >= 2) eligible.push_back(c);
      std::size_t a = eligible[detail::bounded_rand(rng, eligible.size())];
      RecordIndex r = st.members[a][detail::bounded_rand(rng, st.members[a].size())];
      op.cluster_a = st.labels[a];
      op.moved_out = {st.tokens[r]};
      // Destination: one of the other clusters, or a fresh singleton when
      // the source keeps at least one record.
      const bool can_new = st.members[a].size() >= 2;
      std::uint64_t choices = st.members.size() - 1 + (can_new ? 1 : 0);
      std::uint64_t d = detail::bounded_rand(rng, choices);
      if (d < st.members.size() - 1) {
        std::size_t b = d < a ? d : d + 1;
        op.cluster_b = st.labels[b];
      } else {
        op.new_label = fresh_label();
      }
    }
    detail::apply_op(st, op);
    log.ops.push_back(std::move(op));
  }
  return {st.to_clustering(), std::move(log)};
}

/// Re-applies a recorded log to the base clustering it was drawn from.
inline Clustering replay(const Clustering& base, const PerturbationLog& log) {
  auto st = detail::EditState::from(base);
  for (const auto& op : log.ops) detail::apply_op(st, op);
  return st.to_clustering();
}

// ---------------------------------------------------------------------------
// Log serialization

inline std::string render_perturbation_log(const PerturbationLog& log) {
  nlohmann::json ops = nlohmann::json::array();
  for (const auto& op : log.ops) {
    nlohmann::json j;
    j["op"] = std::string(to_string(op.kind));
    switch (op.kind) {
      case PerturbOp::Kind::Split:
        j["cluster"] = op.cluster_a;
        j["movedOut"] = op.moved_out;
        j["newLabel"] = op.new_label;
        break;
      case PerturbOp::Kind::Merge:
        j["into"] = op.cluster_a;
        j["absorbed"] = op.cluster_b;
        break;
      case PerturbOp::Kind::Move:
        j["record"] = op.moved_out[0];
        j["from"] = op.cluster_a;
        if (op.new_label.empty()) j["to"] = op.cluster_b;
        else j["newLabel"] = op.new_label;
        break;
    }
    ops.push_back(std::move(j));
  }
  nlohmann::json j{{"seed", log.seed}, {"ops", std::move(ops)}};
  return j.dump(2) + "\n";
}

inline PerturbationLog parse_perturbation_log(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("perturbation log", 0, e.what());
  }
  try {
    PerturbationLog log;
    log.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& item : j.at("ops")) {
      PerturbOp op;
      auto kind = parse_op_kind(item.at("op").get<std::string>());
      if (!kind) throw Error("unknown op kind in perturbation log");
      op.kind = *kind;
      switch (op.kind) {
        case PerturbOp::Kind::Split:
          op.cluster_a = item.at("cluster").get<std::string>();
          op.moved_out = item.at("movedOut").get<std::vector<std::string>>();
          op.new_label = item.at("newLabel").get<std::string>();
          break;
        case PerturbOp::Kind::Merge:
          op.cluster_a = item.at("into").get<std::string>();
          op.cluster_b = item.at("absorbed").get<std::string>();
          break;
        case PerturbOp::Kind::Move:
          op.moved_out = {item.at("record").get<std::string>()};
          op.cluster_a = item.at("from").get<std::string>();
          if (item.contains("newLabel")) op.new_label = item["newLabel"].get<std::string>();
          else op.cluster_b = item.at("to").get<std::string>();
          break;
      }
      log.ops.push_back(std::move(op));
    }
    return log;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("perturbation log", 0, e.what());
  }
}

}  // namespace ermetrics
