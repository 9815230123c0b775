#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "omnimatch/errors.hpp"
#include "omnimatch/graph.hpp"
#include "omnimatch/spectral.hpp"
#include "omnimatch/warnings.hpp"

namespace omnimatch::oos {

namespace detail {

// Thin SVD of the seed embedding, reused across all vertices of one graph.
struct SeedFactorization {
  Eigen::MatrixXd u;
  Eigen::VectorXd inv_sigma;
  Eigen::MatrixXd v;

  explicit SeedFactorization(const Eigen::MatrixXd& seed_emb) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(seed_emb,
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();
    const auto d = static_cast<int>(seed_emb.cols());
    const double smallest = sigma[d - 1];
    if (smallest <= 1e-10 * sigma[0])
      throw omnimatch::DegenerateInputError(
          "oos_embed: seed embedding is rank-deficient (singular value " +
          std::to_string(d) + " is " + std::to_string(smallest) +
          " against leading " + std::to_string(sigma[0]) + ")");
    u = svd.matrixU();
    v = svd.matrixV();
    inv_sigma = sigma.cwiseInverse();
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    return v * (inv_sigma.asDiagonal() * (u.transpose() * b));
  }
};

}  // namespace detail

// Least-squares out-of-sample embedding: the minimum-norm w minimizing
// sum_j (b_j - seed_emb.row(j) . w)^2, through an orthogonal factorization.
inline Eigen::VectorXd oos_embed(const spectral::EmbeddingMatrix& seed_emb,
                                 const Eigen::VectorXd& b) {
  if (b.size() != seed_emb.values.rows())
    throw std::invalid_argument("oos_embed: adjacency vector has length " +
                                std::to_string(b.size()) + ", expected " +
                                std::to_string(seed_emb.values.rows()));
  const detail::SeedFactorization factor(seed_emb.values);
  if (b.isZero(0.0)) return Eigen::VectorXd::Zero(seed_emb.values.cols());
  return factor.solve(b);
}

// OOS embedding of every unseeded vertex of every graph, regressing each
// vertex's seed-adjacency vector against that graph's own seed embedding.
// All-zero adjacency rows embed to zero and are flagged unidentifiable.
inline std::vector<spectral::EmbeddingMatrix> oos_embed_all(
    const std::vector<core::Graph>& graphs, const core::SeedSplit& split,
    const std::vector<spectral::EmbeddingMatrix>& seed_embs,
    WarningLog* log = nullptr) {
  core::detail::require_canonical(split, "oos_embed_all");
  if (graphs.size() != seed_embs.size())
    throw std::invalid_argument("oos_embed_all: one seed embedding per graph required");
  std::vector<spectral::EmbeddingMatrix> out;
  out.reserve(graphs.size());
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const core::Graph& g = graphs[gi];
    const spectral::EmbeddingMatrix& seed_emb = seed_embs[gi];
    if (g.n != split.n())
      throw std::invalid_argument("oos_embed_all: split does not cover graph " +
                                  std::to_string(gi));
    if (seed_emb.values.rows() != split.s)
      throw std::invalid_argument("oos_embed_all: seed embedding of graph " +
                                  std::to_string(gi) + " has wrong row count");
    const auto d = static_cast<int>(seed_emb.values.cols());
    const detail::SeedFactorization factor(seed_emb.values);
    spectral::EmbeddingMatrix emb;
    emb.values.resize(split.u, d);
    emb.graph_index.assign(static_cast<std::size_t>(split.u), static_cast<int>(gi));
    emb.in_sample.assign(static_cast<std::size_t>(split.u), 0);
    emb.zero_adjacency.assign(static_cast<std::size_t>(split.u), 0);
    for (int v = 0; v < split.u; ++v) {
      const Eigen::VectorXd b = g.weights.col(split.s + v).head(split.s);
      if (b.isZero(0.0)) {
        emb.values.row(v).setZero();
        emb.zero_adjacency[static_cast<std::size_t>(v)] = 1;
        warn_to(log, "oos_embed_all: unseeded vertex " + std::to_string(split.s + v) +
                         " of graph " + std::to_string(gi) +
                         " has no seed adjacency; embedded at the origin");
      } else {
        emb.values.row(v) = factor.solve(b).transpose();
      }
    }
    out.push_back(std::move(emb));
  }
  return out;
}

}  // namespace omnimatch::oos
