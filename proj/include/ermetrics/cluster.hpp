#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>

#include "ermetrics/core.hpp"
#include "ermetrics/pairwise.hpp"

// Cluster-level metrics: exact cluster matches, closest-cluster
// precision/recall via Jaccard similarity, and the purity family
// (ACP, AAP, K, dominant-class purity).

namespace ermetrics {

struct ExactClusterScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t matched = 0;  // |R ∩ S| as sets of clusters
  bool degenerate = false;
};

struct ClosestClusterScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct PurityScores {
  double acp = 0.0;            // average cluster purity
  double aap = 0.0;            // average author purity
  double k = 0.0;              // sqrt(acp * aap)
  double manning_purity = 0.0; // dominant class per left cluster
};

/// All cluster-level metrics in one bundle.
struct ClusterScores {
  double exact_precision = 0.0, exact_recall = 0.0, exact_f1 = 0.0;
  double cc_precision = 0.0, cc_recall = 0.0, cc_f1 = 0.0;
  double acp = 0.0, aap = 0.0, k = 0.0, manning_purity = 0.0;
};

/// |r ∩ s| / |r ∪ s|, from sizes and the intersection count.
inline double jaccard(std::uint64_t r_size, std::uint64_t s_size,
                      std::uint64_t overlap_count) {
  assert(r_size >= 1 && s_size >= 1);
  assert(overlap_count <= std::min(r_size, s_size));
  return static_cast<double>(overlap_count) /
         static_cast<double>(r_size + s_size - overlap_count);
}

/// A cluster matches exactly iff one cell covers both its whole row and
/// whole column. Matches are 1-1, so one count serves both directions.
inline ExactClusterScores exact_cluster(const Overlap& o) {
  ExactClusterScores out;
  for (std::size_t i = 0; i < o.row_count(); ++i)
    for (const auto& c : o.row(i))
      if (c.count == o.row_sizes()[i] && c.count == o.col_sizes()[c.index])
        out.matched++;
  if (o.row_count() == 0) {
    out.precision = 1.0;
    out.degenerate = true;
  } else {
    out.precision = static_cast<double>(out.matched) / static_cast<double>(o.row_count());
  }
  if (o.col_count() == 0) {
    out.recall = 1.0;
    out.degenerate = true;
  } else {
    out.recall = static_cast<double>(out.matched) / static_cast<double>(o.col_count());
  }
  if (out.precision + out.recall == 0.0) out.degenerate = true;
  out.f1 = f1_score(out.precision, out.recall);
  return out;
}

/// Averages each cluster's best Jaccard against the other side. Only
/// nonzero cells can attain the max: every cluster holds at least one
/// record, so every row and column has at least one cell.
inline ClosestClusterScores closest_cluster(const Overlap& o) {
  if (o.row_count() == 0 || o.col_count() == 0)
    throw EmptyClustering("closest-cluster metrics need clusters on both sides");
  ClosestClusterScores out;
  double sum = 0.0;
  for (std::size_t i = 0; i < o.row_count(); ++i) {
    double best = 0.0;
    for (const auto& c : o.row(i))
      best = std::max(best, jaccard(o.row_sizes()[i], o.col_sizes()[c.index], c.count));
    sum += best;
  }
  out.precision = sum / static_cast<double>(o.row_count());
  sum = 0.0;
  for (std::size_t j = 0; j < o.col_count(); ++j) {
    double best = 0.0;
    for (const auto& c : o.col(j))
      best = std::max(best, jaccard(o.col_sizes()[j], o.row_sizes()[c.index], c.count));
    sum += best;
  }
  out.recall = sum / static_cast<double>(o.col_count());
  out.f1 = f1_score(out.precision, out.recall);
  return out;
}

/// ACP = (1/N) Σ |r∩s|²/|r|,  AAP = (1/N) Σ |r∩s|²/|s|,  K = sqrt(ACP·AAP),
/// p = (1/N) Σ_r max_s |r∩s|. Sums run over nonzero cells only.
inline PurityScores purity_family(const Overlap& o) {
  if (o.n() == 0) throw EmptyClustering("purity metrics need at least one record");
  PurityScores out;
  double acp = 0.0, aap = 0.0;
  std::uint64_t dominant = 0;
  for (std::size_t i = 0; i < o.row_count(); ++i) {
    std::uint64_t best = 0;
    for (const auto& c : o.row(i)) {
      const double sq = static_cast<double>(c.count) * static_cast<double>(c.count);
      acp += sq / static_cast<double>(o.row_sizes()[i]);
      aap += sq / static_cast<double>(o.col_sizes()[c.index]);
      best = std::max<std::uint64_t>(best, c.count);
    }
    dominant += best;
  }
  const double n = static_cast<double>(o.n());
  out.acp = acp / n;
  out.aap = aap / n;
  out.k = std::sqrt(out.acp * out.aap);
  out.manning_purity = static_cast<double>(dominant) / n;
  return out;
}

inline ClusterScores cluster_scores(const Overlap& o) {
  ClusterScores out;
  auto e = exact_cluster(o);
  out.exact_precision = e.precision;
  out.exact_recall = e.recall;
  out.exact_f1 = e.f1;
  auto c = closest_cluster(o);
  out.cc_precision = c.precision;
  out.cc_recall = c.recall;
  out.cc_f1 = c.f1;
  auto p = purity_family(o);
  out.acp = p.acp;
  out.aap = p.aap;
  out.k = p.k;
  out.manning_purity = p.manning_purity;
  return out;
}

}  // namespace ermetrics
