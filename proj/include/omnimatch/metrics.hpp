#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "omnimatch/assign.hpp"
#include "omnimatch/errors.hpp"
#include "omnimatch/graph.hpp"

namespace omnimatch::metrics {

struct CorrelationReport {
  double rho_e = 0.0;
  double rho_h = 0.0;
  double rho_t = 0.0;
};

// Symmetric nonnegative graph-to-graph distances with a zero diagonal.
struct DistanceMatrix {
  int size = 0;
  Eigen::MatrixXd values;
};

inline double matching_accuracy(const core::PermutationMap& found,
                                const core::PermutationMap& truth) {
  if (found.size != truth.size)
    throw std::invalid_argument("matching_accuracy: size mismatch");
  if (found.size == 0) return 1.0;  // nothing to match
  int hits = 0;
  for (int v = 0; v < found.size; ++v)
    if (found(v) == truth(v)) ++hits;
  return static_cast<double>(hits) / found.size;
}

// Fraction of vertices whose true partner appears in the candidate list.
inline double soft_accuracy(const assign::SoftMatch& found,
                            const core::PermutationMap& truth) {
  if (static_cast<int>(found.candidates.size()) != truth.size)
    throw std::invalid_argument("soft_accuracy: size mismatch");
  if (truth.size == 0) return 1.0;
  int hits = 0;
  for (int v = 0; v < truth.size; ++v) {
    for (const auto& cand : found.candidates[static_cast<std::size_t>(v)])
      if (cand.target == truth(v)) {
        ++hits;
        break;
      }
  }
  return static_cast<double>(hits) / truth.size;
}

// Delta(A, B, P) = 1/2 ||A P - P B||_F^2 with P the matrix of p
// (P[i][p(i)] = 1), which expands to 1/2 sum_{i,k} (A[i][k] - B[p(i)][p(k)])^2.
inline double delta(const core::Graph& a, const core::Graph& b,
                    const core::PermutationMap& p) {
  if (a.n != b.n || p.size != a.n)
    throw std::invalid_argument("delta: graphs and permutation must share size");
  double total = 0.0;
  for (int i = 0; i < a.n; ++i)
    for (int k = 0; k < a.n; ++k) {
      const double diff = a.weights(i, k) - b.weights(p(i), p(k));
      total += diff * diff;
    }
  return total / 2.0;
}

namespace detail {

inline double density(const core::Graph& g) {
  if (g.n < 2) throw std::invalid_argument("alignment_strength: graphs need n >= 2");
  const double pairs = static_cast<double>(g.n) * (g.n - 1) / 2.0;
  return g.weights.sum() / 2.0 / pairs;
}

}  // namespace detail

// Normalized disagreement rate: [Delta / C(n,2)] / [dA(1-dB) + dB(1-dA)].
// This is the raw ratio; alignment_strength below is 1 minus it.
inline double disagreement_ratio(const core::Graph& a, const core::Graph& b,
                                 const core::PermutationMap& p) {
  if (!a.is_binary || !b.is_binary)
    throw std::invalid_argument("disagreement_ratio: defined for binary graphs");
  if (a.n != b.n || p.size != a.n)
    throw std::invalid_argument("disagreement_ratio: size mismatch");
  const double da = detail::density(a);
  const double db = detail::density(b);
  const double denom = da * (1.0 - db) + db * (1.0 - da);
  if (denom == 0.0)
    throw omnimatch::UndefinedResultError(
        "disagreement_ratio: both graphs empty or both complete; "
        "chance disagreement rate is zero");
  const double pairs = static_cast<double>(a.n) * (a.n - 1) / 2.0;
  return (delta(a, b, p) / pairs) / denom;
}

// 1 - disagreement_ratio: 1 for a perfect alignment of identical graphs,
// ~0 for chance-level agreement, matching the correlation scale it
// converges to on identically distributed pairs.
inline double alignment_strength(const core::Graph& a, const core::Graph& b,
                                 const core::PermutationMap& p) {
  return 1.0 - disagreement_ratio(a, b, p);
}

// Pearson correlation of paired edge indicators over all C(n,2) pairs.
inline double edge_correlation(const core::Graph& a, const core::Graph& b) {
  if (a.n != b.n) throw std::invalid_argument("edge_correlation: size mismatch");
  if (!a.is_binary || !b.is_binary)
    throw std::invalid_argument("edge_correlation: defined for binary graphs");
  const double pairs = static_cast<double>(a.n) * (a.n - 1) / 2.0;
  if (pairs < 1.0) throw std::invalid_argument("edge_correlation: graphs need n >= 2");
  double sa = 0.0, sb = 0.0, sab = 0.0;
  for (int j = 0; j < a.n; ++j)
    for (int i = j + 1; i < a.n; ++i) {
      sa += a.weights(i, j);
      sb += b.weights(i, j);
      sab += a.weights(i, j) * b.weights(i, j);
    }
  const double ma = sa / pairs, mb = sb / pairs;
  const double var_a = ma * (1.0 - ma), var_b = mb * (1.0 - mb);
  if (var_a == 0.0 || var_b == 0.0)
    throw omnimatch::UndefinedResultError(
        "edge_correlation: an indicator vector has zero variance");
  return (sab / pairs - ma * mb) / std::sqrt(var_a * var_b);
}

// rho_h = sigma^2 / (mu (1 - mu)) of the above-diagonal edge probabilities
// (population variance).
inline double heterogeneity_correlation(const Eigen::MatrixXd& p) {
  if (p.rows() != p.cols())
    throw std::invalid_argument("heterogeneity_correlation: matrix must be square");
  const auto n = static_cast<int>(p.rows());
  if (n < 2) throw std::invalid_argument("heterogeneity_correlation: need n >= 2");
  double sum = 0.0, sumsq = 0.0;
  double count = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = j + 1; i < n; ++i) {
      const double v = p(i, j);
      if (v < 0.0 || v > 1.0)
        throw std::invalid_argument("heterogeneity_correlation: entry outside [0, 1]");
      sum += v;
      sumsq += v * v;
      count += 1.0;
    }
  const double mu = sum / count;
  if (mu == 0.0 || mu == 1.0)
    throw omnimatch::UndefinedResultError(
        "heterogeneity_correlation: mean probability is " + std::to_string(mu));
  const double var = sumsq / count - mu * mu;
  return var / (mu * (1.0 - mu));
}

inline double total_correlation(double rho_e, double rho_h) {
  if (rho_e < -1.0 || rho_e > 1.0 || rho_h < 0.0 || rho_h > 1.0)
    throw std::invalid_argument("total_correlation: inputs out of range");
  return 1.0 - (1.0 - rho_e) * (1.0 - rho_h);
}

inline CorrelationReport correlation_report(double rho_e, double rho_h) {
  CorrelationReport r;
  r.rho_e = rho_e;
  r.rho_h = rho_h;
  r.rho_t = total_correlation(rho_e, rho_h);
  return r;
}

// Frobenius distance between aligned graphs, ||A^(i) P - P A^(j)||_F with
// P = I_s (+) Q_ij from the recovered matchings. squared=true reports the
// squared distances instead.
inline DistanceMatrix pairwise_distances(const std::vector<core::Graph>& graphs,
                                         const assign::MatchMatrix& matchings,
                                         bool squared = false) {
  const auto m = static_cast<int>(graphs.size());
  if (matchings.m != m)
    throw std::invalid_argument("pairwise_distances: matchings cover " +
                                std::to_string(matchings.m) + " graphs, got " +
                                std::to_string(m));
  const int n = graphs.empty() ? 0 : graphs.front().n;
  DistanceMatrix dist;
  dist.size = m;
  dist.values = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const core::PermutationMap& q = matchings.at(i, j).permutation;
      const int s = n - q.size;
      if (s < 0)
        throw std::invalid_argument("pairwise_distances: matching larger than graphs");
      const core::Graph& a = graphs[static_cast<std::size_t>(i)];
      const core::Graph& b = graphs[static_cast<std::size_t>(j)];
      if (a.n != n || b.n != n)
        throw std::invalid_argument("pairwise_distances: graphs must share size");
      // f = identity on seeds, s+v -> s+q(v) on the unseeded block.
      std::vector<int> f(static_cast<std::size_t>(n));
      for (int v = 0; v < s; ++v) f[static_cast<std::size_t>(v)] = v;
      for (int v = 0; v < q.size; ++v) f[static_cast<std::size_t>(s + v)] = s + q(v);
      double total = 0.0;
      for (int v = 0; v < n; ++v)
        for (int w = 0; w < n; ++w) {
          const double diff = a.weights(v, w) - b.weights(f[static_cast<std::size_t>(v)],
                                                          f[static_cast<std::size_t>(w)]);
          total += diff * diff;
        }
      dist.values(i, j) = squared ? total : std::sqrt(total);
      dist.values(j, i) = dist.values(i, j);
    }
  return dist;
}

// Agglomerative clustering with complete linkage (inter-cluster distance =
// max member pair), cut at exactly k clusters. Merge ties are broken by the
// smallest (min-member, min-member) index pair. Labels are assigned 0..k-1
// in order of each cluster's smallest member.
inline std::vector<int> complete_linkage_clusters(const DistanceMatrix& dist, int k) {
  const int n = dist.size;
  if (k < 1 || k > n)
    throw std::invalid_argument("complete_linkage_clusters: k must be in 1..size");
  if (dist.values.rows() != n || dist.values.cols() != n)
    throw std::invalid_argument("complete_linkage_clusters: malformed distance matrix");

  std::vector<std::vector<int>> members(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) members[static_cast<std::size_t>(i)] = {i};
  Eigen::MatrixXd d = dist.values;  // complete-linkage distances between clusters
  std::vector<char> alive(static_cast<std::size_t>(n), 1);
  int clusters = n;

  while (clusters > k) {
    int best_i = -1, best_j = -1;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!alive[static_cast<std::size_t>(i)]) continue;
      for (int j = i + 1; j < n; ++j) {
        if (!alive[static_cast<std::size_t>(j)]) continue;
        if (best_i == -1 || d(i, j) < best) {
          best = d(i, j);
          best_i = i;
          best_j = j;
        }
        // Strict < keeps the earliest (i, j); rows are indexed by smallest
        // member, so this is the smallest-index-pair tie rule.
      }
    }
    auto& into = members[static_cast<std::size_t>(best_i)];
    auto& from = members[static_cast<std::size_t>(best_j)];
    into.insert(into.end(), from.begin(), from.end());
    from.clear();
    alive[static_cast<std::size_t>(best_j)] = 0;
    for (int t = 0; t < n; ++t) {
      if (!alive[static_cast<std::size_t>(t)] || t == best_i) continue;
      const double merged = std::max(d(best_i, t), d(best_j, t));
      d(best_i, t) = merged;
      d(t, best_i) = merged;
    }
    --clusters;
  }

  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    if (!alive[static_cast<std::size_t>(i)]) continue;
    for (int v : members[static_cast<std::size_t>(i)])
      labels[static_cast<std::size_t>(v)] = next;
    ++next;
  }
  return labels;
}

// Adjusted Rand index via the pair-counting contingency formula. The
// degenerate zero-denominator cases only arise for identical partitions,
// where the index is 1 by convention.
template <typename LabelA, typename LabelB>
double adjusted_rand_index(const std::vector<LabelA>& a, const std::vector<LabelB>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("adjusted_rand_index: label lengths differ");
  const auto n = a.size();
  if (n < 2) return 1.0;  // partitions of < 2 items are always identical
  std::map<LabelA, int> ida;
  std::map<LabelB, int> idb;
  std::vector<int> la(n), lb(n);
  for (std::size_t i = 0; i < n; ++i) {
    la[i] = static_cast<int>(ida.emplace(a[i], static_cast<int>(ida.size())).first->second);
    lb[i] = static_cast<int>(idb.emplace(b[i], static_cast<int>(idb.size())).first->second);
  }
  const auto ra = static_cast<int>(ida.size());
  const auto rb = static_cast<int>(idb.size());
  std::vector<std::vector<std::int64_t>> table(static_cast<std::size_t>(ra),
                                               std::vector<std::int64_t>(static_cast<std::size_t>(rb), 0));
  std::vector<std::int64_t> rows(static_cast<std::size_t>(ra), 0);
  std::vector<std::int64_t> cols(static_cast<std::size_t>(rb), 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++table[static_cast<std::size_t>(la[i])][static_cast<std::size_t>(lb[i])];
    ++rows[static_cast<std::size_t>(la[i])];
    ++cols[static_cast<std::size_t>(lb[i])];
  }
  const auto choose2 = [](std::int64_t x) -> double {
    return 0.5 * static_cast<double>(x) * static_cast<double>(x - 1);
  };
  double index = 0.0, row_sum = 0.0, col_sum = 0.0;
  for (int i = 0; i < ra; ++i)
    for (int j = 0; j < rb; ++j) index += choose2(table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
  for (int i = 0; i < ra; ++i) row_sum += choose2(rows[static_cast<std::size_t>(i)]);
  for (int j = 0; j < rb; ++j) col_sum += choose2(cols[static_cast<std::size_t>(j)]);
  const double total = choose2(static_cast<std::int64_t>(n));
  const double expected = row_sum * col_sum / total;
  const double max_index = 0.5 * (row_sum + col_sum);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace omnimatch::metrics
