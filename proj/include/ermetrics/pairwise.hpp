#pragma once

#include <cstdint>

#include "ermetrics/core.hpp"

// Pairwise precision/recall/F1 over intra-cluster pairs. Inter-cluster
// pairs (true negatives) are never part of any metric here.

namespace ermetrics {

/// Harmonic mean with the zero convention: 0 when both inputs are 0.
inline double f1_score(double precision, double recall) {
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

struct PairwiseScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t true_pair_count = 0;       // |Pairs(S)|
  std::uint64_t predicted_pair_count = 0;  // |Pairs(R)|
  std::uint64_t shared_pair_count = 0;     // |Pairs(R) ∩ Pairs(S)|
  bool degenerate = false;                 // a zero-denominator convention fired
};

/// |Pairs(R) ∩ Pairs(S)|. A pair lies in both clusterings iff both
/// records share a contingency cell, so this is Σ C(|r∩s|, 2).
inline std::uint64_t shared_pair_count(const Overlap& o) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < o.row_count(); ++i)
    for (const auto& c : o.row(i)) total += pairs_in(c.count);
  return total;
}

/// Zero-denominator conventions: precision := 1 when the left side has
/// no intra pairs (vacuously correct), recall := 1 when the right side
/// has none; F1 := 0 when precision + recall = 0.
inline PairwiseScores pairwise(const Overlap& o) {
  PairwiseScores out;
  for (auto sz : o.row_sizes()) out.predicted_pair_count += pairs_in(sz);
  for (auto sz : o.col_sizes()) out.true_pair_count += pairs_in(sz);
  out.shared_pair_count = shared_pair_count(o);

  if (out.predicted_pair_count == 0) {
    out.precision = 1.0;
    out.degenerate = true;
  } else {
    out.precision = static_cast<double>(out.shared_pair_count) /
                    static_cast<double>(out.predicted_pair_count);
  }
  if (out.true_pair_count == 0) {
    out.recall = 1.0;
    out.degenerate = true;
  } else {
    out.recall = static_cast<double>(out.shared_pair_count) /
                 static_cast<double>(out.true_pair_count);
  }
  if (out.precision + out.recall == 0.0) out.degenerate = true;
  out.f1 = f1_score(out.precision, out.recall);
  return out;
}

}  // namespace ermetrics
