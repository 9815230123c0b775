#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "omnimatch/graph.hpp"
#include "omnimatch/rng.hpp"

namespace omnimatch::models {

// n x d latent-position matrix; rows are the vertices' latent vectors.
struct LatentPositions {
  int n = 0;
  int d = 0;
  Eigen::MatrixXd values;
};

// Extremes of x_i . x_j over all vertex pairs, for auditing that the
// inner-product edge probabilities stay inside [0, 1].
struct InnerProductAudit {
  double min = 0.0;
  double max = 0.0;
};

struct ModelConfig {
  int n = 0;
  int d = 0;
  int m = 1;
  int concentration_len = 0;  // Dirichlet parameter length; must exceed d
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 1 || d < 1 || m < 1)
      throw std::invalid_argument("ModelConfig: n, d, m must be positive");
    if (concentration_len <= d)
      throw std::invalid_argument("ModelConfig: concentration_len must exceed d");
  }
};

inline InnerProductAudit audit_inner_products(const LatentPositions& x) {
  const Eigen::MatrixXd p = x.values * x.values.transpose();
  InnerProductAudit audit;
  bool first = true;
  for (int j = 0; j < x.n; ++j)
    for (int i = j + 1; i < x.n; ++i) {
      const double v = p(i, j);
      if (first || v < audit.min) audit.min = v;
      if (first || v > audit.max) audit.max = v;
      first = false;
    }
  return audit;
}

// Rows are the first d coordinates of flat-Dirichlet(concentration_len)
// draws (normalized i.i.d. Exp(1) vectors), which keeps every pairwise
// inner product inside (0, 1).
inline LatentPositions sample_dirichlet_latents(const ModelConfig& cfg, Rng& rng) {
  cfg.validate();
  LatentPositions x;
  x.n = cfg.n;
  x.d = cfg.d;
  x.values.resize(cfg.n, cfg.d);
  std::vector<double> e(static_cast<std::size_t>(cfg.concentration_len));
  for (int i = 0; i < cfg.n; ++i) {
    double total = 0.0;
    for (double& ej : e) {
      ej = rng.exponential();
      total += ej;
    }
    for (int j = 0; j < cfg.d; ++j)
      x.values(i, j) = e[static_cast<std::size_t>(j)] / total;
  }
  return x;
}

inline LatentPositions sample_dirichlet_latents(int n, int d, int concentration_len,
                                                Rng& rng) {
  ModelConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.concentration_len = concentration_len;
  return sample_dirichlet_latents(cfg, rng);
}

// Edge-probability matrix P = X X^T with zeroed diagonal.
inline Eigen::MatrixXd probability_matrix(const LatentPositions& x) {
  Eigen::MatrixXd p = x.values * x.values.transpose();
  p.diagonal().setZero();
  return p;
}

// One RDPG draw: independent Bernoulli(x_i . x_j) above the diagonal.
// clamp=false rejects out-of-range probabilities; clamp=true snaps them to
// [0, 1], which is how perturbed latent positions are sampled.
inline core::Graph sample_rdpg(const LatentPositions& x, Rng& rng, bool clamp = false) {
  core::Graph g;
  g.n = x.n;
  g.is_binary = true;
  g.weights = Eigen::MatrixXd::Zero(x.n, x.n);
  for (int i = 0; i < x.n; ++i)
    for (int j = i + 1; j < x.n; ++j) {
      double p = x.values.row(i).dot(x.values.row(j));
      if (p < 0.0 || p > 1.0) {
        if (!clamp)
          throw std::invalid_argument(
              "sample_rdpg: inner product " + std::to_string(p) + " for pair (" +
              std::to_string(i) + ", " + std::to_string(j) + ") is outside [0, 1]");
        p = std::clamp(p, 0.0, 1.0);
      }
      if (rng.bernoulli(p)) {
        g.weights(i, j) = 1.0;
        g.weights(j, i) = 1.0;
      }
    }
  return g;
}

// m conditionally independent RDPG draws sharing x.
inline std::vector<core::Graph> sample_jrdpg(const LatentPositions& x, int m, Rng& rng,
                                             bool clamp = false) {
  if (m < 1) throw std::invalid_argument("sample_jrdpg: m must be >= 1");
  std::vector<core::Graph> graphs;
  graphs.reserve(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) graphs.push_back(sample_rdpg(x, rng, clamp));
  return graphs;
}

// Constant-shift noise: every coordinate increased by err. Out-of-range
// inner products that this may cause are clamped at sampling time.
inline LatentPositions perturb_latents(const LatentPositions& x, double err) {
  if (err < 0.0) throw std::invalid_argument("perturb_latents: err must be >= 0");
  LatentPositions y = x;
  y.values.array() += err;
  return y;
}

// Alternative noise model: i.i.d. Uniform(0, err) added per coordinate.
inline LatentPositions perturb_latents_uniform(const LatentPositions& x, double err,
                                               Rng& rng) {
  if (err < 0.0)
    throw std::invalid_argument("perturb_latents_uniform: err must be >= 0");
  LatentPositions y = x;
  for (int i = 0; i < y.n; ++i)
    for (int j = 0; j < y.d; ++j) y.values(i, j) += err * rng.uniform01();
  return y;
}

// Uniform random permutation (Fisher-Yates).
inline core::PermutationMap random_shuffle(int u, Rng& rng) {
  if (u < 1) throw std::invalid_argument("random_shuffle: u must be >= 1");
  core::PermutationMap q;
  q.size = u;
  q.image = shuffled_indices(u, rng);
  return q;
}

// Adds err once to every probability involving a vertex in `vertices`
// (entries are clamped to [0, 1]; the diagonal stays zero).
inline Eigen::MatrixXd perturb_probabilities(const Eigen::MatrixXd& p,
                                             const std::vector<int>& vertices,
                                             double err) {
  if (p.rows() != p.cols())
    throw std::invalid_argument("perturb_probabilities: matrix must be square");
  const auto n = static_cast<int>(p.rows());
  std::vector<char> hit(static_cast<std::size_t>(n), 0);
  for (int v : vertices) {
    if (v < 0 || v >= n)
      throw std::invalid_argument("perturb_probabilities: vertex " +
                                  std::to_string(v) + " out of range");
    hit[static_cast<std::size_t>(v)] = 1;
  }
  Eigen::MatrixXd out = p;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (hit[static_cast<std::size_t>(i)] || hit[static_cast<std::size_t>(j)])
        out(i, j) = std::clamp(out(i, j) + err, 0.0, 1.0);
    }
  return out;
}

// Bernoulli graph from an explicit symmetric probability matrix.
inline core::Graph sample_bernoulli_graph(const Eigen::MatrixXd& p, Rng& rng) {
  if (p.rows() != p.cols())
    throw std::invalid_argument("sample_bernoulli_graph: matrix must be square");
  const auto n = static_cast<int>(p.rows());
  core::Graph g;
  g.n = n;
  g.is_binary = true;
  g.weights = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double pij = p(i, j);
      if (pij < 0.0 || pij > 1.0)
        throw std::invalid_argument("sample_bernoulli_graph: probability " +
                                    std::to_string(pij) + " at (" + std::to_string(i) +
                                    ", " + std::to_string(j) + ") is outside [0, 1]");
      if (rng.bernoulli(pij)) {
        g.weights(i, j) = 1.0;
        g.weights(j, i) = 1.0;
      }
    }
  return g;
}

}  // namespace omnimatch::models
