#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "omnimatch/graph.hpp"
#include "omnimatch/spectral.hpp"
#include "omnimatch/warnings.hpp"

namespace omnimatch::omni {

// (m*s) x (m*s) block matrix with block (i,j) = (A^(i) + A^(j)) / 2.
struct OmnibusMatrix {
  int m = 0;
  int s = 0;
  Eigen::MatrixXd values;
};

inline OmnibusMatrix build_omnibus(const std::vector<core::Graph>& graphs) {
  if (graphs.empty()) throw std::invalid_argument("build_omnibus: need m >= 1 graphs");
  const int s = graphs.front().n;
  for (const auto& g : graphs)
    if (g.n != s)
      throw std::invalid_argument("build_omnibus: graphs must share a vertex count (got " +
                                  std::to_string(g.n) + " and " + std::to_string(s) + ")");
  const auto m = static_cast<int>(graphs.size());
  OmnibusMatrix omni;
  omni.m = m;
  omni.s = s;
  omni.values.resize(static_cast<Eigen::Index>(m) * s, static_cast<Eigen::Index>(m) * s);
  for (int i = 0; i < m; ++i) {
    omni.values.block(i * s, i * s, s, s) = graphs[static_cast<std::size_t>(i)].weights;
    for (int j = i + 1; j < m; ++j) {
      // (A+B)/2 is itself symmetric, so the (j,i) block is the same matrix.
      const Eigen::MatrixXd avg = (graphs[static_cast<std::size_t>(i)].weights +
                                   graphs[static_cast<std::size_t>(j)].weights) /
                                  2.0;
      omni.values.block(i * s, j * s, s, s) = avg;
      omni.values.block(j * s, i * s, s, s) = avg;
    }
  }
  return omni;
}

// Joint embedding: ASE of the omnibus matrix, cut into the m per-graph row
// blocks (block i = rows i*s .. (i+1)*s - 1).
inline std::vector<spectral::EmbeddingMatrix> omni_embed(
    const std::vector<core::Graph>& graphs, int d, WarningLog* log = nullptr) {
  const OmnibusMatrix omni = build_omnibus(graphs);
  const spectral::EmbeddingMatrix joint = spectral::ase(omni.values, d, log);
  std::vector<spectral::EmbeddingMatrix> blocks;
  blocks.reserve(static_cast<std::size_t>(omni.m));
  for (int i = 0; i < omni.m; ++i) {
    spectral::EmbeddingMatrix block;
    block.values = joint.values.middleRows(static_cast<Eigen::Index>(i) * omni.s, omni.s);
    block.graph_index.assign(static_cast<std::size_t>(omni.s), i);
    block.in_sample.assign(static_cast<std::size_t>(omni.s), 1);
    block.zero_adjacency.assign(static_cast<std::size_t>(omni.s), 0);
    blocks.push_back(std::move(block));
  }
  return blocks;
}

}  // namespace omnimatch::omni
