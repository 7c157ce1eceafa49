#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "ermetrics/core.hpp"
#include "ermetrics/pairwise.hpp"

// Generalized Merge Distance: the cost of the legal split/merge path
// from the left clustering to the right one, under order-independent
// cost families. Order independence pins the total of every legal path,
// so the distance is computed in one pass over the contingency table:
// each left cluster is split into its nonzero right-intersections, then
// each right cluster's pieces are merged back up.

namespace ermetrics {

enum class CostKind { Constant, Product, Affine, ViInfo };

/// Order-independent split/merge cost f(x, y) over piece sizes.
///   constant  f = k
///   product   f = k·x·y
///   affine    f = k1 + k2·x·y
///   vi-info   f = ((x+y)·ln(x+y) − x·ln x − y·ln y) / n
class CostFamily {
public:
  static CostFamily constant(double k) { return {CostKind::Constant, k, 0.0, 0}; }
  static CostFamily product(double k) { return {CostKind::Product, 0.0, k, 0}; }
  static CostFamily affine(double k1, double k2) { return {CostKind::Affine, k1, k2, 0}; }
  static CostFamily vi_info(std::uint64_t n) { return {CostKind::ViInfo, 0.0, 0.0, n}; }

  CostKind kind() const { return kind_; }
  double k1() const { return k1_; }
  double k2() const { return k2_; }
  std::uint64_t n() const { return n_; }

  /// vi-info built without a record count; bound by gmd() at evaluation.
  bool unbound() const { return kind_ == CostKind::ViInfo && n_ == 0; }
  CostFamily bound_to(std::uint64_t n) const {
    if (unbound()) return vi_info(n);
    return *this;
  }

  double operator()(std::uint64_t x, std::uint64_t y) const {
    assert(x >= 1 && y >= 1);
    switch (kind_) {
      case CostKind::Constant:
        return k1_;
      case CostKind::Product:
      case CostKind::Affine:
        return k1_ + k2_ * static_cast<double>(x) * static_cast<double>(y);
      case CostKind::ViInfo: {
        assert(n_ >= 1);
        const double dx = static_cast<double>(x), dy = static_cast<double>(y);
        return ((dx + dy) * std::log(dx + dy) - dx * std::log(dx) - dy * std::log(dy)) /
               static_cast<double>(n_);
      }
    }
    return 0.0;
  }

  friend bool operator==(const CostFamily&, const CostFamily&) = default;

private:
  CostFamily(CostKind kind, double k1, double k2, std::uint64_t n)
      : kind_(kind), k1_(k1), k2_(k2), n_(n) {}

  CostKind kind_;
  double k1_, k2_;  // constant stores k in k1; product stores k in k2
  std::uint64_t n_; // vi-info only
};

inline double family_cost(const CostFamily& f, std::uint64_t x, std::uint64_t y) {
  return f(x, y);
}

struct GmdConfig {
  CostFamily split = CostFamily::product(1.0);
  CostFamily merge = CostFamily::product(1.0);
};

/// One pass over the table: split every row into its cells (peeling one
/// piece at a time), merge every column's cells cumulatively. O(n + nnz).
inline double gmd(const Overlap& o, const GmdConfig& cfg) {
  const CostFamily split = cfg.split.bound_to(o.n());
  const CostFamily merge = cfg.merge.bound_to(o.n());
  double cost = 0.0;
  for (std::size_t i = 0; i < o.row_count(); ++i) {
    const auto cells = o.row(i);
    if (cells.size() < 2) continue;
    std::uint64_t remaining = o.row_sizes()[i];
    for (std::size_t c = 0; c + 1 < cells.size(); ++c) {
      cost += split(cells[c].count, remaining - cells[c].count);
      remaining -= cells[c].count;
    }
  }
  for (std::size_t j = 0; j < o.col_count(); ++j) {
    const auto cells = o.col(j);
    if (cells.size() < 2) continue;
    std::uint64_t acc = cells[0].count;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      cost += merge(acc, cells[c].count);
      acc += cells[c].count;
    }
  }
  return cost;
}

struct GmdPairwiseScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Pairwise metrics through the distance engine: a product-cost split
/// destroys exactly the pairs the left side over-claims, a product-cost
/// merge counts the pairs it misses. Degenerate sides fall back to the
/// pairwise-metrics conventions.
inline GmdPairwiseScores pairwise_via_gmd(const Overlap& o) {
  GmdPairwiseScores out;
  std::uint64_t pairs_left = 0, pairs_right = 0;
  for (auto sz : o.row_sizes()) pairs_left += pairs_in(sz);
  for (auto sz : o.col_sizes()) pairs_right += pairs_in(sz);

  if (pairs_left == 0) {
    out.precision = 1.0;
  } else {
    const double d = gmd(o, {CostFamily::product(1.0), CostFamily::constant(0.0)});
    out.precision = 1.0 - d / static_cast<double>(pairs_left);
  }
  if (pairs_right == 0) {
    out.recall = 1.0;
  } else {
    const double d = gmd(o, {CostFamily::constant(0.0), CostFamily::product(1.0)});
    out.recall = 1.0 - d / static_cast<double>(pairs_right);
  }
  out.f1 = f1_score(out.precision, out.recall);
  return out;
}

/// VI as a merge distance: entropy-delta costs on both operations.
inline double vi_via_gmd(const Overlap& o) {
  assert(o.n() >= 1);
  const auto f = CostFamily::vi_info(o.n());
  return gmd(o, {f, f});
}

}  // namespace ermetrics
