#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace omnimatch::core {

// Symmetric, hollow adjacency matrix; weights are real, with binary graphs
// flagged as the special case the samplers produce.
struct Graph {
  int n = 0;
  Eigen::MatrixXd weights;
  bool is_binary = false;

  Graph() = default;
  Graph(Eigen::MatrixXd w, bool binary)
      : n(static_cast<int>(w.rows())), weights(std::move(w)), is_binary(binary) {}

  // Throws std::invalid_argument on any violated structural invariant.
  void validate() const {
    if (weights.rows() != n || weights.cols() != n)
      throw std::invalid_argument("Graph: weights must be n x n");
    for (int j = 0; j < n; ++j) {
      if (weights(j, j) != 0.0)
        throw std::invalid_argument("Graph: diagonal must be zero at vertex " +
                                    std::to_string(j));
      for (int i = j + 1; i < n; ++i) {
        if (weights(i, j) != weights(j, i))
          throw std::invalid_argument("Graph: weights not symmetric at (" +
                                      std::to_string(i) + ", " + std::to_string(j) + ")");
        if (is_binary && weights(i, j) != 0.0 && weights(i, j) != 1.0)
          throw std::invalid_argument("Graph: non-binary entry in binary graph at (" +
                                      std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
};

// Bijection on {0..size-1}; image[i] is where source index i lands.
struct PermutationMap {
  int size = 0;
  std::vector<int> image;

  void validate() const {
    if (static_cast<int>(image.size()) != size)
      throw std::invalid_argument("PermutationMap: image length != size");
    std::vector<char> seen(static_cast<std::size_t>(size), 0);
    for (int v : image) {
      if (v < 0 || v >= size)
        throw std::invalid_argument("PermutationMap: image entry out of range");
      if (seen[static_cast<std::size_t>(v)])
        throw std::invalid_argument("PermutationMap: image is not a bijection");
      seen[static_cast<std::size_t>(v)] = 1;
    }
  }

  PermutationMap inverse() const {
    PermutationMap inv;
    inv.size = size;
    inv.image.resize(image.size());
    for (int i = 0; i < size; ++i)
      inv.image[static_cast<std::size_t>(image[static_cast<std::size_t>(i)])] = i;
    return inv;
  }

  bool is_identity() const {
    for (int i = 0; i < size; ++i)
      if (image[static_cast<std::size_t>(i)] != i) return false;
    return true;
  }

  int operator()(int i) const { return image[static_cast<std::size_t>(i)]; }
};

inline PermutationMap identity_permutation(int size) {
  PermutationMap p;
  p.size = size;
  p.image.resize(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) p.image[static_cast<std::size_t>(i)] = i;
  return p;
}

// Seed/unseeded partition of the vertex set. The canonical layout used by
// the whole pipeline puts seeds at 0..s-1 and unseeded vertices at s..n-1;
// file ingestion reorders arbitrary seed lists into this layout up front.
struct SeedSplit {
  int s = 0;
  int u = 0;
  std::vector<int> seed_ids;
  std::vector<int> unseeded_ids;

  static SeedSplit canonical(int s, int u) {
    if (s < 0 || u < 0) throw std::invalid_argument("SeedSplit: negative counts");
    SeedSplit split;
    split.s = s;
    split.u = u;
    split.seed_ids.resize(static_cast<std::size_t>(s));
    split.unseeded_ids.resize(static_cast<std::size_t>(u));
    for (int i = 0; i < s; ++i) split.seed_ids[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < u; ++i) split.unseeded_ids[static_cast<std::size_t>(i)] = s + i;
    return split;
  }

  int n() const { return s + u; }

  void validate() const {
    if (static_cast<int>(seed_ids.size()) != s ||
        static_cast<int>(unseeded_ids.size()) != u)
      throw std::invalid_argument("SeedSplit: id list lengths disagree with counts");
    std::vector<char> seen(static_cast<std::size_t>(n()), 0);
    for (int v : seed_ids) {
      if (v < 0 || v >= n() || seen[static_cast<std::size_t>(v)])
        throw std::invalid_argument("SeedSplit: seed_ids not a partition part");
      seen[static_cast<std::size_t>(v)] = 1;
    }
    for (int v : unseeded_ids) {
      if (v < 0 || v >= n() || seen[static_cast<std::size_t>(v)])
        throw std::invalid_argument("SeedSplit: unseeded_ids overlap or out of range");
      seen[static_cast<std::size_t>(v)] = 1;
    }
  }

  bool is_canonical() const {
    for (int i = 0; i < s; ++i)
      if (seed_ids[static_cast<std::size_t>(i)] != i) return false;
    for (int i = 0; i < u; ++i)
      if (unseeded_ids[static_cast<std::size_t>(i)] != s + i) return false;
    return true;
  }
};

namespace detail {

inline void require_canonical(const SeedSplit& split, const char* where) {
  split.validate();
  if (!split.is_canonical())
    throw std::invalid_argument(std::string(where) +
                                ": split must use the canonical seeds-first layout");
}

}  // namespace detail

// Permutes the unseeded block of g by q, leaving the seed block untouched:
// vertex a of g lands at position f(a), where f = id on seeds and
// f(s+i) = s+q(i). The planted correspondence g -> result is therefore q.
inline Graph apply_shuffle(const Graph& g, const SeedSplit& split,
                           const PermutationMap& q) {
  detail::require_canonical(split, "apply_shuffle");
  if (split.n() != g.n)
    throw std::invalid_argument("apply_shuffle: split does not cover the graph");
  if (q.size != split.u)
    throw std::invalid_argument("apply_shuffle: permutation size " +
                                std::to_string(q.size) + " != unseeded count " +
                                std::to_string(split.u));
  q.validate();
  std::vector<int> f(static_cast<std::size_t>(g.n));
  for (int i = 0; i < split.s; ++i) f[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < split.u; ++i)
    f[static_cast<std::size_t>(split.s + i)] = split.s + q(i);
  Graph out;
  out.n = g.n;
  out.is_binary = g.is_binary;
  out.weights.resize(g.n, g.n);
  for (int j = 0; j < g.n; ++j)
    for (int i = 0; i < g.n; ++i)
      out.weights(f[static_cast<std::size_t>(i)], f[static_cast<std::size_t>(j)]) =
          g.weights(i, j);
  return out;
}

// The s x s restriction of g to its seed block.
inline Graph induced_seed_subgraph(const Graph& g, const SeedSplit& split) {
  detail::require_canonical(split, "induced_seed_subgraph");
  if (split.n() != g.n)
    throw std::invalid_argument("induced_seed_subgraph: split does not cover the graph");
  Graph out;
  out.n = split.s;
  out.is_binary = g.is_binary;
  out.weights = g.weights.topLeftCorner(split.s, split.s);
  return out;
}

// (p then q): image[i] = q(p(i)).
inline PermutationMap compose(const PermutationMap& p, const PermutationMap& q) {
  if (p.size != q.size)
    throw std::invalid_argument("compose: size mismatch (" + std::to_string(p.size) +
                                " vs " + std::to_string(q.size) + ")");
  PermutationMap out;
  out.size = p.size;
  out.image.resize(static_cast<std::size_t>(p.size));
  for (int i = 0; i < p.size; ++i) out.image[static_cast<std::size_t>(i)] = q(p(i));
  return out;
}

}  // namespace omnimatch::core
