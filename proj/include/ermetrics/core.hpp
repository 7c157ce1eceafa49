#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ermetrics/errors.hpp"

// Core model: record interning, clusterings (partitions of a record
// universe), universe alignment, and the sparse contingency table all
// metrics are computed from.

namespace ermetrics {

using RecordIndex = std::uint32_t;

inline std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n\f\v";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

/// One input row: a record identifier and the label of its cluster.
struct Assignment {
  std::string record;
  std::string label;
};

/// A partition of record identifiers into disjoint, non-empty clusters.
/// Record tokens are interned to dense indices at construction; all
/// computation downstream works on the dense indices. Instances are
/// immutable and share their state on copy, so passing one around by
/// value costs a reference bump, not a rebuild of the token index.
class Clustering {
public:
  Clustering() : state_(empty_state()) {}

  /// Groups records by label. Repeated identical rows are idempotent;
  /// a record under two different labels throws ConflictingAssignment.
  static Clustering from_assignments(std::span<const Assignment> rows) {
    State st;
    std::unordered_map<std::string, RecordIndex> label_index;
    for (const auto& row : rows) {
      std::string token(trim(row.record));
      if (token.empty()) throw Error("record id empty after trimming");
      std::string label(trim(row.label));

      auto [lit, lnew] = label_index.try_emplace(label, static_cast<RecordIndex>(st.cluster_labels.size()));
      if (lnew) {
        st.cluster_labels.push_back(label);
        st.cluster_sizes.push_back(0);
      }
      RecordIndex cluster = lit->second;

      auto [rit, rnew] = st.index.try_emplace(token, static_cast<RecordIndex>(st.tokens.size()));
      if (rnew) {
        st.tokens.push_back(std::move(token));
        st.assignment.push_back(cluster);
        st.cluster_sizes[cluster]++;
      } else if (st.assignment[rit->second] != cluster) {
        throw ConflictingAssignment(st.tokens[rit->second],
                                    st.cluster_labels[st.assignment[rit->second]],
                                    label);
      }
    }
    return Clustering(std::move(st));
  }

  static Clustering from_assignments(const std::vector<Assignment>& rows) {
    return from_assignments(std::span<const Assignment>(rows));
  }

  /// Builds from explicit member groups; labels optional (one per group).
  static Clustering from_groups(const std::vector<std::vector<std::string>>& groups,
                                std::vector<std::string> labels = {}) {
    std::vector<Assignment> rows;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      std::string label = i < labels.size() ? labels[i] : "c" + std::to_string(i);
      for (const auto& rec : groups[i]) rows.push_back({rec, label});
    }
    auto c = from_assignments(rows);
    if (c.cluster_count() != groups.size())
      throw Error("empty group in cluster list");
    return c;
  }

  /// Fast path for generated data: tokens and a dense cluster assignment.
  /// Cluster indices must be contiguous 0..k-1 with every cluster non-empty.
  static Clustering from_dense(std::vector<std::string> tokens,
                               std::vector<RecordIndex> cluster_of,
                               std::vector<std::string> labels = {}) {
    if (tokens.size() != cluster_of.size())
      throw Error("token/assignment length mismatch");
    State st;
    st.tokens = std::move(tokens);
    st.assignment = std::move(cluster_of);
    st.index.reserve(st.tokens.size() * 2);
    RecordIndex k = 0;
    for (auto a : st.assignment) k = std::max(k, a + 1);
    if (st.assignment.empty()) k = 0;
    st.cluster_sizes.assign(k, 0);
    for (std::size_t i = 0; i < st.tokens.size(); ++i) {
      auto token = std::string(trim(st.tokens[i]));
      if (token.empty()) throw Error("record id empty after trimming");
      st.tokens[i] = std::move(token);
      auto [it, fresh] = st.index.try_emplace(st.tokens[i], static_cast<RecordIndex>(i));
      if (!fresh) throw Error("duplicate record id '" + st.tokens[i] + "'");
      st.cluster_sizes[st.assignment[i]]++;
    }
    for (std::size_t j = 0; j < st.cluster_sizes.size(); ++j)
      if (st.cluster_sizes[j] == 0)
        throw Error("cluster " + std::to_string(j) + " is empty");
    if (labels.empty()) {
      st.cluster_labels.resize(k);
      for (RecordIndex j = 0; j < k; ++j) st.cluster_labels[j] = "c" + std::to_string(j);
    } else {
      if (labels.size() != k) throw Error("label count mismatch");
      st.cluster_labels = std::move(labels);
    }
    return Clustering(std::move(st));
  }

  std::size_t record_count() const { return state_->tokens.size(); }
  std::size_t cluster_count() const { return state_->cluster_sizes.size(); }

  const std::vector<std::string>& tokens() const { return state_->tokens; }
  const std::vector<RecordIndex>& assignments() const { return state_->assignment; }
  const std::vector<std::uint64_t>& cluster_sizes() const { return state_->cluster_sizes; }
  const std::vector<std::string>& cluster_labels() const { return state_->cluster_labels; }

  std::optional<RecordIndex> index_of(std::string_view token) const {
    const auto& index = state_->index;
    auto it = index.find(std::string(token));
    if (it == index.end()) return std::nullopt;
    return it->second;
  }

  /// Member record indices per cluster, in record-index order.
  std::vector<std::vector<RecordIndex>> member_lists() const {
    const State& st = *state_;
    std::vector<std::vector<RecordIndex>> out(st.cluster_sizes.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j].reserve(st.cluster_sizes[j]);
    for (RecordIndex i = 0; i < st.assignment.size(); ++i)
      out[st.assignment[i]].push_back(i);
    return out;
  }

private:
  struct State {
    std::vector<std::string> tokens;                    // dense id -> token
    std::unordered_map<std::string, RecordIndex> index; // token -> dense id
    std::vector<RecordIndex> assignment;                // dense id -> cluster
    std::vector<std::uint64_t> cluster_sizes;
    std::vector<std::string> cluster_labels;
  };

  explicit Clustering(State st)
      : state_(std::make_shared<const State>(std::move(st))) {}

  static const std::shared_ptr<const State>& empty_state() {
    static const auto empty = std::make_shared<const State>();
    return empty;
  }

  std::shared_ptr<const State> state_;
};

/// Set-of-sets equality over the shared record tokens; ignores labels,
/// cluster order, and record order.
inline bool same_partition(const Clustering& a, const Clustering& b) {
  if (a.record_count() != b.record_count()) return false;
  if (a.cluster_count() != b.cluster_count()) return false;
  // a-cluster -> b-cluster it must equal, checked by size and membership
  std::vector<std::int64_t> image(a.cluster_count(), -1);
  for (RecordIndex i = 0; i < a.record_count(); ++i) {
    auto bi = b.index_of(a.tokens()[i]);
    if (!bi) return false;
    auto ca = a.assignments()[i];
    auto cb = b.assignments()[*bi];
    if (image[ca] == -1) image[ca] = cb;
    else if (image[ca] != cb) return false;
  }
  for (std::size_t j = 0; j < a.cluster_count(); ++j)
    if (a.cluster_sizes()[j] != b.cluster_sizes()[static_cast<std::size_t>(image[j])])
      return false;
  return true;
}

enum class UniversePolicy { Strict, Intersection, UnionSingletons };

inline std::string_view to_string(UniversePolicy p) {
  switch (p) {
    case UniversePolicy::Strict: return "strict";
    case UniversePolicy::Intersection: return "intersection";
    case UniversePolicy::UnionSingletons: return "union-singletons";
  }
  return "?";
}

inline std::optional<UniversePolicy> parse_universe_policy(std::string_view s) {
  if (s == "strict") return UniversePolicy::Strict;
  if (s == "intersection") return UniversePolicy::Intersection;
  if (s == "union-singletons") return UniversePolicy::UnionSingletons;
  return std::nullopt;
}

/// Two clusterings reconciled onto one record universe. Both sides are
/// rebuilt over a shared token table, so record index i means the same
/// record in left() and right().
class AlignedPair {
public:
  AlignedPair(Clustering left, Clustering right, UniversePolicy policy)
      : left_(std::move(left)), right_(std::move(right)), policy_(policy) {
    assert(left_.record_count() == right_.record_count());
  }

  const Clustering& left() const { return left_; }
  const Clustering& right() const { return right_; }
  std::uint64_t n() const { return left_.record_count(); }
  UniversePolicy policy() const { return policy_; }

private:
  Clustering left_, right_;
  UniversePolicy policy_;
};

namespace detail {

// Rebuilds `c` over the joint token table, keeping only records with
// keep[id] set. Emptied clusters are dropped; cluster order is preserved.
// Fresh singleton clusters are appended for `extra` tokens.
inline Clustering rebuild(const Clustering& c,
                          const std::vector<std::string>& joint_tokens,
                          const std::vector<RecordIndex>& local_of_joint,
                          const std::vector<char>& keep_joint,
                          const std::vector<RecordIndex>& extra_singletons) {
  constexpr RecordIndex kAbsent = static_cast<RecordIndex>(-1);
  std::vector<std::string> tokens;
  std::vector<RecordIndex> assign;
  tokens.reserve(joint_tokens.size());
  assign.reserve(joint_tokens.size());

  std::vector<std::uint64_t> new_size(c.cluster_count(), 0);
  for (RecordIndex j = 0; j < joint_tokens.size(); ++j) {
    if (!keep_joint[j]) continue;
    if (local_of_joint[j] != kAbsent)
      new_size[c.assignments()[local_of_joint[j]]]++;
  }
  std::vector<RecordIndex> remap(c.cluster_count(), kAbsent);
  std::vector<std::string> labels;
  RecordIndex next = 0;
  for (std::size_t k = 0; k < c.cluster_count(); ++k) {
    if (new_size[k] == 0) continue;
    remap[k] = next++;
    labels.push_back(c.cluster_labels()[k]);
  }

  std::vector<RecordIndex> singleton_cluster(joint_tokens.size(), kAbsent);
  for (RecordIndex j : extra_singletons) {
    singleton_cluster[j] = next++;
    labels.push_back("");
  }

  for (RecordIndex j = 0; j < joint_tokens.size(); ++j) {
    if (!keep_joint[j]) continue;
    tokens.push_back(joint_tokens[j]);
    if (local_of_joint[j] != kAbsent)
      assign.push_back(remap[c.assignments()[local_of_joint[j]]]);
    else
      assign.push_back(singleton_cluster[j]);
  }
  return Clustering::from_dense(std::move(tokens), std::move(assign), std::move(labels));
}

}  // namespace detail

/// Reconciles the record universes of r and s.
///   strict           — universes must already be equal (UniverseMismatch otherwise)
///   intersection     — both sides restricted to shared records, emptied clusters dropped
///   union-singletons — one-sided records appear on the other side as fresh singletons
inline AlignedPair align(const Clustering& r, const Clustering& s, UniversePolicy policy) {
  constexpr RecordIndex kAbsent = static_cast<RecordIndex>(-1);

  // Identical token sequences need no reconciliation under any policy
  // (clusters are never empty, so intersection and union change nothing).
  // This sidesteps the per-token index probing for the common case of
  // two files listing the same records in the same order.
  if (r.tokens() == s.tokens()) return AlignedPair(r, s, policy);

  // joint token order: left order, then right-only in right order
  std::vector<std::string> joint = r.tokens();
  std::vector<RecordIndex> left_local(joint.size());
  for (RecordIndex i = 0; i < joint.size(); ++i) left_local[i] = i;
  std::vector<RecordIndex> right_local(joint.size(), kAbsent);

  std::uint64_t right_only = 0, left_only = 0;
  std::vector<std::string> right_only_sample, left_only_sample;
  std::vector<RecordIndex> right_fresh;  // joint ids present only in s

  for (RecordIndex i = 0; i < s.record_count(); ++i) {
    const auto& tok = s.tokens()[i];
    if (auto li = r.index_of(tok)) {
      right_local[*li] = i;
    } else {
      right_only++;
      if (right_only_sample.size() < 10) right_only_sample.push_back(tok);
      right_fresh.push_back(static_cast<RecordIndex>(joint.size()));
      joint.push_back(tok);
      left_local.push_back(kAbsent);
      right_local.push_back(i);
    }
  }
  std::vector<RecordIndex> left_fresh;
  for (RecordIndex j = 0; j < r.record_count(); ++j) {
    if (right_local[j] == kAbsent) {
      left_only++;
      if (left_only_sample.size() < 10) left_only_sample.push_back(joint[j]);
      left_fresh.push_back(j);
    }
  }

  switch (policy) {
    case UniversePolicy::Strict: {
      if (left_only != 0 || right_only != 0)
        throw UniverseMismatch(left_only, std::move(left_only_sample),
                               right_only, std::move(right_only_sample));
      // same token set; reindex s onto r's token order
      std::vector<char> keep(joint.size(), 1);
      auto nr = detail::rebuild(s, joint, right_local, keep, {});
      return AlignedPair(r, std::move(nr), policy);
    }
    case UniversePolicy::Intersection: {
      std::vector<char> keep(joint.size(), 0);
      for (RecordIndex j = 0; j < joint.size(); ++j)
        keep[j] = left_local[j] != kAbsent && right_local[j] != kAbsent;
      auto nl = detail::rebuild(r, joint, left_local, keep, {});
      auto nr = detail::rebuild(s, joint, right_local, keep, {});
      return AlignedPair(std::move(nl), std::move(nr), policy);
    }
    case UniversePolicy::UnionSingletons: {
      std::vector<char> keep(joint.size(), 1);
      auto nl = detail::rebuild(r, joint, left_local, keep, right_fresh);
      auto nr = detail::rebuild(s, joint, right_local, keep, left_fresh);
      return AlignedPair(std::move(nl), std::move(nr), policy);
    }
  }
  throw Error("unreachable");
}

/// Sparse contingency table of cluster intersection counts |r ∩ s|,
/// stored row-major and column-major. Zero cells are absent; every
/// stored count is >= 1. Counts fit 32 bits because RecordIndex already
/// caps the universe; the 8-byte cell keeps big tables cache-resident.
struct OverlapCell {
  std::uint32_t index;  // column index in a row view, row index in a column view
  std::uint32_t count;
  friend bool operator==(const OverlapCell&, const OverlapCell&) = default;
};

class Overlap {
public:
  Overlap() = default;

  std::uint64_t n() const { return n_; }
  std::size_t row_count() const { return row_sizes_.size(); }
  std::size_t col_count() const { return col_sizes_.size(); }
  std::size_t nonzero_count() const { return row_cells_.size(); }

  const std::vector<std::uint64_t>& row_sizes() const { return row_sizes_; }
  const std::vector<std::uint64_t>& col_sizes() const { return col_sizes_; }

  std::span<const OverlapCell> row(std::size_t i) const {
    return {row_cells_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::span<const OverlapCell> col(std::size_t j) const {
    return {col_cells_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
  }

  /// Linear scan of one row; for tests and small tables.
  std::uint64_t cell(std::size_t i, std::size_t j) const {
    for (const auto& c : row(i))
      if (c.index == j) return c.count;
    return 0;
  }

  Overlap transposed() const {
    Overlap t;
    t.n_ = n_;
    t.row_sizes_ = col_sizes_;
    t.col_sizes_ = row_sizes_;
    t.row_ptr_ = col_ptr_;
    t.col_ptr_ = row_ptr_;
    t.row_cells_ = col_cells_;
    t.col_cells_ = row_cells_;
    return t;
  }

  static Overlap build(const AlignedPair& pair) {
    Overlap o;
    o.rebuild(pair);
    return o;
  }

  /// Rebuilds the table from `pair` in place, recycling this object's
  /// storage (and a per-thread scratch workspace). Evaluation loops hit
  /// a zero-allocation steady state once buffers reach their high-water
  /// size.
  void rebuild(const AlignedPair& pair) {
    const auto& la = pair.left().assignments();
    const auto& ra = pair.right().assignments();
    Overlap& o = *this;
    o.n_ = pair.n();
    o.row_sizes_ = pair.left().cluster_sizes();
    o.col_sizes_ = pair.right().cluster_sizes();
    const std::size_t rows = o.row_sizes_.size();
    const std::size_t cols = o.col_sizes_.size();
    Workspace& ws = workspace();

    // group right-cluster ids by left cluster (counting sort)
    ws.start.assign(rows + 1, 0);
    for (auto c : la) ws.start[c + 1]++;
    for (std::size_t i = 0; i < rows; ++i) ws.start[i + 1] += ws.start[i];
    ws.col_by_row.resize(la.size());
    {
      ws.cursor.assign(ws.start.begin(), ws.start.end());
      for (RecordIndex rec = 0; rec < la.size(); ++rec)
        ws.col_by_row[ws.cursor[la[rec]]++] = ra[rec];
    }

    // one pass per row; mark[col] points at this row's cell if >= row start
    // (kNeverSeen never passes that test because cell_start only grows).
    // A record contributes at most one fresh cell, so n bounds the cell
    // count: reserving it up front avoids regrowth copies mid-pass.
    constexpr std::uint32_t kNeverSeen = static_cast<std::uint32_t>(-1);
    o.row_ptr_.assign(rows + 1, 0);
    o.row_cells_.clear();
    o.row_cells_.reserve(la.size());
    ws.mark.assign(cols, kNeverSeen);
    for (std::size_t i = 0; i < rows; ++i) {
      const std::size_t cell_start = o.row_cells_.size();
      for (std::size_t p = ws.start[i]; p < ws.start[i + 1]; ++p) {
        const auto s = ws.col_by_row[p];
        if (ws.mark[s] != kNeverSeen && ws.mark[s] >= cell_start) {
          o.row_cells_[ws.mark[s]].count++;
        } else {
          ws.mark[s] = static_cast<std::uint32_t>(o.row_cells_.size());
          o.row_cells_.push_back({s, 1});
        }
      }
      o.row_ptr_[i + 1] = o.row_cells_.size();
    }

    // transpose (counting sort by column)
    o.col_ptr_.assign(cols + 1, 0);
    for (const auto& c : o.row_cells_) o.col_ptr_[c.index + 1]++;
    for (std::size_t j = 0; j < cols; ++j) o.col_ptr_[j + 1] += o.col_ptr_[j];
    const std::size_t nnz = o.row_cells_.size();
    o.col_cells_.resize(nnz);
    if (nnz * sizeof(OverlapCell) <= (std::size_t{1} << 20)) {
      // small table: scatter straight to the final positions
      ws.cursor.assign(o.col_ptr_.begin(), o.col_ptr_.end());
      for (std::size_t i = 0; i < rows; ++i)
        for (const auto& c : o.row(i))
          o.col_cells_[ws.cursor[c.index]++] = {static_cast<std::uint32_t>(i), c.count};
    } else {
      // Large table: a direct scatter touches col_cells_ in random order
      // and thrashes the cache once the array outgrows it. Stage the
      // cells into ~256 buckets by column high bits (sequential writes),
      // then place each bucket; its columns span a contiguous,
      // cache-sized window of col_cells_.
      constexpr std::size_t kBuckets = 256;
      std::size_t shift = 0;
      while ((cols - 1) >> shift >= kBuckets) ++shift;
      ws.bucket_ptr.assign(kBuckets + 1, 0);
      for (const auto& c : o.row_cells_) ws.bucket_ptr[(c.index >> shift) + 1]++;
      for (std::size_t b = 0; b < kBuckets; ++b) ws.bucket_ptr[b + 1] += ws.bucket_ptr[b];
      ws.staged.resize(nnz);
      {
        ws.cursor.assign(ws.bucket_ptr.begin(), ws.bucket_ptr.end());
        for (std::size_t i = 0; i < rows; ++i)
          for (const auto& c : o.row(i))
            ws.staged[ws.cursor[c.index >> shift]++] = {c.index, static_cast<std::uint32_t>(i), c.count};
      }
      // staged is bucket-major and row-major inside each bucket, so this
      // pass is stable and yields the same order as the direct scatter
      ws.cursor.assign(o.col_ptr_.begin(), o.col_ptr_.end());
      for (const auto& t : ws.staged)
        o.col_cells_[ws.cursor[t.col]++] = {t.row, t.count};
    }
  }

private:
  struct StagedCell {
    std::uint32_t col, row, count;
  };
  // Scratch buffers for rebuild, recycled across calls on each thread.
  struct Workspace {
    std::vector<std::size_t> start, cursor, bucket_ptr;
    std::vector<RecordIndex> col_by_row;
    std::vector<std::uint32_t> mark;
    std::vector<StagedCell> staged;
  };
  static Workspace& workspace() {
    static thread_local Workspace ws;
    return ws;
  }

  std::uint64_t n_ = 0;
  std::vector<std::uint64_t> row_sizes_, col_sizes_;
  std::vector<std::size_t> row_ptr_, col_ptr_;
  std::vector<OverlapCell> row_cells_, col_cells_;
};

inline Overlap overlap(const AlignedPair& pair) { return Overlap::build(pair); }

inline std::uint64_t pairs_in(std::uint64_t size) { return size * (size - 1) / 2; }

/// |Pairs(c)|: number of unordered intra-cluster pairs.
inline std::uint64_t intra_pair_count(const Clustering& c) {
  std::uint64_t total = 0;
  for (auto sz : c.cluster_sizes()) total += pairs_in(sz);
  return total;
}

/// C(n,2) - intra pairs. Diagnostic only; no metric consumes it.
inline std::uint64_t inter_pair_count(const Clustering& c) {
  return pairs_in(c.record_count()) - intra_pair_count(c);
}

}  // namespace ermetrics
