#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "omnimatch/graph.hpp"
#include "omnimatch/omni.hpp"
#include "omnimatch/oos.hpp"
#include "omnimatch/spectral.hpp"
#include "omnimatch/warnings.hpp"

namespace omnimatch::assign {

// u x u Euclidean distances between the out-of-sample embeddings of a graph
// pair; source_pair records which pair.
struct CostMatrix {
  int u = 0;
  Eigen::MatrixXd values;
  std::pair<int, int> source_pair{0, 1};
};

enum class MatchMethod { hard, soft };

struct MatchResult {
  core::PermutationMap permutation;  // graph-i unseeded -> graph-j unseeded
  double total_cost = 0.0;
  MatchMethod method = MatchMethod::hard;
  int k = 0;  // nearest-neighbor count when method == soft
};

// Per source vertex: its k nearest target vertices, distances non-decreasing,
// distance ties broken by lower target index.
struct SoftMatch {
  struct Candidate {
    int target = 0;
    double distance = 0.0;
  };
  std::vector<std::vector<Candidate>> candidates;
  int k = 0;
};

inline CostMatrix cost_matrix(const spectral::EmbeddingMatrix& emb_i,
                              const spectral::EmbeddingMatrix& emb_j) {
  if (emb_i.values.rows() != emb_j.values.rows() ||
      emb_i.values.cols() != emb_j.values.cols())
    throw std::invalid_argument("cost_matrix: embeddings must share shape");
  CostMatrix c;
  c.u = static_cast<int>(emb_i.values.rows());
  c.values.resize(c.u, c.u);
  for (int v = 0; v < c.u; ++v)
    for (int w = 0; w < c.u; ++w)
      c.values(v, w) = (emb_i.values.row(v) - emb_j.values.row(w)).norm();
  return c;
}

namespace detail {

// Jonker-Volgenant shortest augmenting path assignment, O(u^3). Produces an
// optimal column-per-row assignment plus optimal dual potentials.
struct LapSolution {
  std::vector<int> col_of_row;
  std::vector<double> row_dual;
  std::vector<double> col_dual;
};

inline LapSolution jv_assignment(const Eigen::MatrixXd& cost) {
  const auto n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based internal arrays; p[j] = row matched to column j.
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  LapSolution sol;
  sol.col_of_row.assign(static_cast<std::size_t>(n), -1);
  sol.row_dual.resize(static_cast<std::size_t>(n));
  sol.col_dual.resize(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j)
    sol.col_of_row[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  for (int i = 1; i <= n; ++i) sol.row_dual[static_cast<std::size_t>(i - 1)] = u[static_cast<std::size_t>(i)];
  for (int j = 1; j <= n; ++j) sol.col_dual[static_cast<std::size_t>(j - 1)] = v[static_cast<std::size_t>(j)];
  return sol;
}

// Kuhn augmenting-path matching over an adjacency-list bipartite graph;
// used to test whether a partial lexicographic choice still extends to a
// perfect matching on the tight-edge graph.
struct TightMatcher {
  const std::vector<std::vector<int>>& adj;  // tight columns per row
  std::vector<int> row_of_col;

  explicit TightMatcher(const std::vector<std::vector<int>>& a)
      : adj(a), row_of_col(a.size(), -1) {}

  bool augment(int row, std::vector<char>& visited,
               const std::vector<char>& col_banned) {
    for (int c : adj[static_cast<std::size_t>(row)]) {
      if (col_banned[static_cast<std::size_t>(c)] || visited[static_cast<std::size_t>(c)])
        continue;
      visited[static_cast<std::size_t>(c)] = 1;
      if (row_of_col[static_cast<std::size_t>(c)] == -1 ||
          augment(row_of_col[static_cast<std::size_t>(c)], visited, col_banned)) {
        row_of_col[static_cast<std::size_t>(c)] = row;
        return true;
      }
    }
    return false;
  }
};

// Among all minimum-cost assignments (equivalently: perfect matchings of
// the tight-edge graph of an optimal dual), returns the lexicographically
// smallest by (row 0's column, row 1's column, ...).
inline std::vector<int> lexicographic_tightening(const Eigen::MatrixXd& cost,
                                                 const LapSolution& sol) {
  const auto n = static_cast<int>(cost.rows());
  const double scale = std::max(1.0, cost.cwiseAbs().maxCoeff());
  const double eps = 1e-9 * scale;

  std::vector<std::vector<int>> tight(static_cast<std::size_t>(n));
  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (std::abs(cost(r, c) - sol.row_dual[static_cast<std::size_t>(r)] -
                   sol.col_dual[static_cast<std::size_t>(c)]) <= eps) {
        tight[static_cast<std::size_t>(r)].push_back(c);
        ++degree[static_cast<std::size_t>(r)];
      }

  std::vector<int> chosen(static_cast<std::size_t>(n), -1);
  std::vector<char> col_taken(static_cast<std::size_t>(n), 0);
  for (int r = 0; r < n; ++r) {
    // Fast path: a row with a single tight column must use it in every
    // optimal assignment, so no feasibility probe is needed.
    if (degree[static_cast<std::size_t>(r)] == 1) {
      const int only = tight[static_cast<std::size_t>(r)][0];
      if (col_taken[static_cast<std::size_t>(only)])
        throw omnimatch::NumericFailureError(
            "solve_lap: dual tolerance too tight for row " + std::to_string(r));
      chosen[static_cast<std::size_t>(r)] = only;
      col_taken[static_cast<std::size_t>(only)] = 1;
      continue;
    }
    for (int c : tight[static_cast<std::size_t>(r)]) {
      if (col_taken[static_cast<std::size_t>(c)]) continue;
      // Feasibility: rows r+1..n-1 must still match into the free columns.
      TightMatcher matcher(tight);
      bool ok = true;
      std::vector<char> banned = col_taken;
      banned[static_cast<std::size_t>(c)] = 1;
      for (int rr = r + 1; rr < n && ok; ++rr) {
        std::vector<char> visited(static_cast<std::size_t>(n), 0);
        ok = matcher.augment(rr, visited, banned);
      }
      if (ok) {
        chosen[static_cast<std::size_t>(r)] = c;
        col_taken[static_cast<std::size_t>(c)] = 1;
        break;
      }
    }
    if (chosen[static_cast<std::size_t>(r)] == -1)
      throw omnimatch::NumericFailureError(
          "solve_lap: tight-edge canonicalization found no feasible column for row " +
          std::to_string(r));
  }
  return chosen;
}

}  // namespace detail

// Exact minimum-cost assignment (Hungarian/Jonker-Volgenant). Cost ties are
// resolved to the lexicographically smallest optimal permutation.
inline MatchResult solve_lap(const CostMatrix& c) {
  const int n = c.u;
  if (n < 1) throw std::invalid_argument("solve_lap: u must be >= 1");
  if (c.values.rows() != n || c.values.cols() != n)
    throw std::invalid_argument("solve_lap: cost matrix must be u x u");
  if (!c.values.allFinite())
    throw std::invalid_argument("solve_lap: cost matrix contains non-finite entries");

  const detail::LapSolution sol = detail::jv_assignment(c.values);
  const std::vector<int> image = detail::lexicographic_tightening(c.values, sol);

  MatchResult result;
  result.method = MatchMethod::hard;
  result.permutation.size = n;
  result.permutation.image = image;
  result.total_cost = 0.0;
  for (int v = 0; v < n; ++v)
    result.total_cost += c.values(v, image[static_cast<std::size_t>(v)]);
  return result;
}

// The k nearest targets per source vertex (k capped at u), sorted by
// distance with index tie-breaks.
inline SoftMatch soft_match(const CostMatrix& c, int k) {
  if (k < 1) throw std::invalid_argument("soft_match: k must be >= 1");
  const int n = c.u;
  const int kk = std::min(k, n);
  SoftMatch sm;
  sm.k = kk;
  sm.candidates.resize(static_cast<std::size_t>(n));
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    for (int w = 0; w < n; ++w) order[static_cast<std::size_t>(w)] = w;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (c.values(v, a) != c.values(v, b)) return c.values(v, a) < c.values(v, b);
      return a < b;
    });
    auto& list = sm.candidates[static_cast<std::size_t>(v)];
    list.resize(static_cast<std::size_t>(kk));
    for (int t = 0; t < kk; ++t)
      list[static_cast<std::size_t>(t)] = {order[static_cast<std::size_t>(t)],
                                           c.values(v, order[static_cast<std::size_t>(t)])};
  }
  return sm;
}

enum class MatchMode { anchor, pairwise };

// m x m grid of pair matchings; entry (i,j) maps graph i's unseeded block
// onto graph j's. The diagonal holds identity matches.
struct MatchMatrix {
  int m = 0;
  MatchMode mode = MatchMode::pairwise;
  int anchor = -1;  // only meaningful in anchor mode
  std::vector<std::vector<MatchResult>> results;

  const MatchResult& at(int i, int j) const {
    return results[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
};

// The full seeded-matching pipeline: seed subgraphs -> joint omnibus
// embedding -> out-of-sample embedding of the unseeded blocks -> LAP per
// pair. d == 0 selects the embedding dimension from the omnibus scree.
// Anchor mode solves only i<->anchor and derives (i,j) by composition.
inline MatchMatrix omnimatch(const std::vector<core::Graph>& graphs,
                             const core::SeedSplit& split, int d, MatchMode mode,
                             int anchor = -1, WarningLog* log = nullptr,
                             int max_auto_dim = 50) {
  const auto m = static_cast<int>(graphs.size());
  if (m < 2) throw std::invalid_argument("omnimatch: need at least 2 graphs");
  core::detail::require_canonical(split, "omnimatch");
  for (const auto& g : graphs)
    if (g.n != split.n())
      throw std::invalid_argument("omnimatch: split does not cover every graph");
  if (mode == MatchMode::anchor) {
    if (anchor < 0) anchor = m - 1;
    if (anchor >= m) throw std::invalid_argument("omnimatch: anchor index out of range");
  }

  std::vector<core::Graph> seeds;
  seeds.reserve(static_cast<std::size_t>(m));
  for (const auto& g : graphs) seeds.push_back(core::induced_seed_subgraph(g, split));

  if (d == 0) {
    const omni::OmnibusMatrix omni_mat = omni::build_omnibus(seeds);
    const spectral::Spectrum spec = spectral::eig_symmetric(omni_mat.values);
    d = spectral::select_dimension(spec.eigenvalues.cwiseAbs(), max_auto_dim, 1, log);
  }
  if (split.s < d)
    throw std::invalid_argument("omnimatch: need at least d=" + std::to_string(d) +
                                " seeds, have " + std::to_string(split.s));

  const auto seed_embs = omni::omni_embed(seeds, d, log);
  const auto oos_embs = oos::oos_embed_all(graphs, split, seed_embs, log);

  for (int i = 0; i < m; ++i)
    for (int v = 0; v < split.u; ++v)
      if (oos_embs[static_cast<std::size_t>(i)].zero_adjacency[static_cast<std::size_t>(v)])
        warn_to(log, "omnimatch: vertex " + std::to_string(split.s + v) + " of graph " +
                         std::to_string(i) +
                         " is unidentifiable (no seed adjacency); its matches are "
                         "arbitrary");

  MatchMatrix grid;
  grid.m = m;
  grid.mode = mode;
  grid.anchor = (mode == MatchMode::anchor) ? anchor : -1;
  grid.results.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    grid.results[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(m));
    MatchResult identity;
    identity.permutation = core::identity_permutation(split.u);
    identity.total_cost = 0.0;
    grid.results[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = identity;
  }

  auto solve_pair = [&](int i, int j) {
    CostMatrix c = cost_matrix(oos_embs[static_cast<std::size_t>(i)],
                               oos_embs[static_cast<std::size_t>(j)]);
    c.source_pair = {i, j};
    MatchResult forward;
    if (split.u == 0) {
      // Nothing to assign; the empty permutation is the only candidate.
      forward.method = MatchMethod::hard;
      forward.permutation = core::identity_permutation(0);
      forward.total_cost = 0.0;
    } else {
      forward = solve_lap(c);
    }
    MatchResult backward;
    backward.method = MatchMethod::hard;
    backward.permutation = forward.permutation.inverse();
    backward.total_cost = forward.total_cost;
    grid.results[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::move(forward);
    grid.results[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = std::move(backward);
  };

  if (mode == MatchMode::pairwise) {
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) solve_pair(i, j);
  } else {
    for (int i = 0; i < m; ++i)
      if (i != anchor) solve_pair(i, anchor);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        if (i == j || i == anchor || j == anchor) continue;
        MatchResult via;
        via.method = MatchMethod::hard;
        via.permutation = core::compose(grid.at(i, anchor).permutation,
                                        grid.at(anchor, j).permutation);
        // Cost of the composed tuple under C^(i,j) (not a LAP optimum).
        via.total_cost = 0.0;
        for (int v = 0; v < split.u; ++v)
          via.total_cost += (oos_embs[static_cast<std::size_t>(i)].values.row(v) -
                             oos_embs[static_cast<std::size_t>(j)].values.row(
                                 via.permutation(v)))
                                .norm();
        grid.results[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::move(via);
      }
  }
  return grid;
}

// Total multigraph assignment cost of a tuple of per-graph permutations:
// sum over graph pairs (i<j) and vertices t of C^(i,j)[p_i(t)][p_j(t)].
inline double mlap_cost(const std::vector<core::PermutationMap>& assignment,
                        const std::vector<std::vector<CostMatrix>>& costs) {
  const auto m = static_cast<int>(assignment.size());
  if (m < 2) throw std::invalid_argument("mlap_cost: need at least 2 permutations");
  const int u = assignment.front().size;
  for (const auto& p : assignment)
    if (p.size != u) throw std::invalid_argument("mlap_cost: permutation sizes disagree");
  if (static_cast<int>(costs.size()) != m)
    throw std::invalid_argument("mlap_cost: cost grid must be m x m");
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(costs[static_cast<std::size_t>(i)].size()) != m)
      throw std::invalid_argument("mlap_cost: cost grid must be m x m");
    for (int j = i + 1; j < m; ++j) {
      const CostMatrix& c = costs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (c.u != u)
        throw std::invalid_argument("mlap_cost: cost matrix (" + std::to_string(i) +
                                    ", " + std::to_string(j) + ") has size " +
                                    std::to_string(c.u) + ", expected " +
                                    std::to_string(u));
      for (int t = 0; t < u; ++t)
        total += c.values(assignment[static_cast<std::size_t>(i)](t),
                          assignment[static_cast<std::size_t>(j)](t));
    }
  }
  return total;
}

}  // namespace omnimatch::assign
