#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <span>

#include "ermetrics/core.hpp"

// Entropy-based metrics in nats: marginal and conditional entropies,
// homogeneity, completeness, V-measure, and Variation of Information.
// 0·log 0 contributes 0 throughout; sparsity makes that automatic.

namespace ermetrics {

enum class Direction { SGivenR, RGivenS };

struct InfoScores {
  double h_s = 0.0, h_r = 0.0;
  double h_s_given_r = 0.0, h_r_given_s = 0.0;
  double homogeneity = 0.0, completeness = 0.0;
  double v_measure = 0.0;
  double beta = 1.0;
  double vi = 0.0;
};

/// H = −Σ (|c|/N)·ln(|c|/N) over record proportions.
inline double marginal_entropy(std::span<const std::uint64_t> sizes, std::uint64_t n) {
  assert(n >= 1);
  const double dn = static_cast<double>(n);
  double h = 0.0;
  for (auto sz : sizes) {
    const double p = static_cast<double>(sz) / dn;
    h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

/// H(S|R) = −(1/N) Σ |r∩s|·ln(|r∩s| / |r|); the transpose for R given S.
inline double conditional_entropy(const Overlap& o, Direction dir) {
  assert(o.n() >= 1);
  double total = 0.0;
  if (dir == Direction::SGivenR) {
    for (std::size_t i = 0; i < o.row_count(); ++i) {
      const double row = static_cast<double>(o.row_sizes()[i]);
      for (const auto& c : o.row(i))
        total += static_cast<double>(c.count) *
                 std::log(static_cast<double>(c.count) / row);
    }
  } else {
    for (std::size_t j = 0; j < o.col_count(); ++j) {
      const double col = static_cast<double>(o.col_sizes()[j]);
      for (const auto& c : o.col(j))
        total += static_cast<double>(c.count) *
                 std::log(static_cast<double>(c.count) / col);
    }
  }
  return std::max(-total / static_cast<double>(o.n()), 0.0);
}

/// Homogeneity = 1 − H(S|R)/H(S) with the H(S)=0 guard; completeness is
/// the transpose. Clamped to [0,1] against rounding at the boundaries.
inline std::pair<double, double> homogeneity_completeness(const Overlap& o) {
  assert(o.n() >= 1);
  const double h_s = marginal_entropy(o.col_sizes(), o.n());
  const double h_r = marginal_entropy(o.row_sizes(), o.n());
  double hom = 1.0, com = 1.0;
  if (h_s > 0.0) hom = 1.0 - conditional_entropy(o, Direction::SGivenR) / h_s;
  if (h_r > 0.0) com = 1.0 - conditional_entropy(o, Direction::RGivenS) / h_r;
  hom = std::clamp(hom, 0.0, 1.0);
  com = std::clamp(com, 0.0, 1.0);
  return {hom, com};
}

/// V_β = (1+β²)·hom·com / (β²·hom + com); 0 when both inputs are 0.
inline double v_measure(double homogeneity, double completeness, double beta = 1.0) {
  assert(beta > 0.0);
  const double b2 = beta * beta;
  const double denom = b2 * homogeneity + completeness;
  if (denom == 0.0) return 0.0;
  return (1.0 + b2) * homogeneity * completeness / denom;
}

/// VI(R,S) = H(S|R) + H(R|S), in nats.
inline double variation_of_information(const Overlap& o) {
  assert(o.n() >= 1);
  return conditional_entropy(o, Direction::SGivenR) +
         conditional_entropy(o, Direction::RGivenS);
}

inline InfoScores info_scores(const Overlap& o, double beta = 1.0) {
  InfoScores out;
  out.beta = beta;
  out.h_s = marginal_entropy(o.col_sizes(), o.n());
  out.h_r = marginal_entropy(o.row_sizes(), o.n());
  out.h_s_given_r = conditional_entropy(o, Direction::SGivenR);
  out.h_r_given_s = conditional_entropy(o, Direction::RGivenS);
  double hom = 1.0, com = 1.0;
  if (out.h_s > 0.0) hom = std::clamp(1.0 - out.h_s_given_r / out.h_s, 0.0, 1.0);
  if (out.h_r > 0.0) com = std::clamp(1.0 - out.h_r_given_s / out.h_r, 0.0, 1.0);
  out.homogeneity = hom;
  out.completeness = com;
  out.v_measure = v_measure(hom, com, beta);
  out.vi = out.h_s_given_r + out.h_r_given_s;
  return out;
}

}  // namespace ermetrics
