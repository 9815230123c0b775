#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "omnimatch/assign.hpp"
#include "omnimatch/graph.hpp"
#include "omnimatch/models.hpp"
#include "omnimatch/omni.hpp"
#include "omnimatch/oos.hpp"
#include "omnimatch/parallel.hpp"
#include "omnimatch/rng.hpp"
#include "omnimatch/spectral.hpp"

namespace omnimatch::testing {

// Two-sample shuffled-graph test configuration. v0 and v1 are the number of
// shuffled vertices under the null and the alternative; in each arm the
// shuffled vertices form the unseeded block (the rest are seeds), so an
// alternative with v1 < v0 is tested conservatively: its critical value was
// calibrated against the larger null block.
struct TestConfig {
  int n = 500;
  int d = 2;
  int v0 = 120;
  std::vector<int> v1{120};
  double err = 0.0;
  double alpha = 0.05;
  int n_mc = 200;
  assign::MatchMethod method = assign::MatchMethod::hard;
  int k = 5;  // soft-matching neighbor count
  int dirichlet_offset = 2;  // concentration length = d + offset
  bool uniform_noise = false;  // Uniform(0, err) entrywise instead of the constant shift
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 2 || d < 1) throw std::invalid_argument("TestConfig: n, d must be positive");
    if (v0 < 0 || v0 > n) throw std::invalid_argument("TestConfig: v0 must be in 0..n");
    if (n - v0 < d)
      throw std::invalid_argument("TestConfig: v0=" + std::to_string(v0) +
                                  " leaves fewer than d seeds");
    if (v1.empty()) throw std::invalid_argument("TestConfig: v1 grid is empty");
    for (int v : v1) {
      if (v < 0 || v > n) throw std::invalid_argument("TestConfig: v1 must be in 0..n");
      if (n - v < d)
        throw std::invalid_argument("TestConfig: v1=" + std::to_string(v) +
                                    " leaves fewer than d seeds");
    }
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::invalid_argument("TestConfig: alpha must be in (0, 1)");
    if (n_mc < 20) throw std::invalid_argument("TestConfig: n_mc must be >= 20");
    if (method == assign::MatchMethod::soft && k < 1)
      throw std::invalid_argument("TestConfig: soft method needs k >= 1");
    if (err < 0.0) throw std::invalid_argument("TestConfig: err must be >= 0");
    if (dirichlet_offset < 1)
      throw std::invalid_argument("TestConfig: dirichlet_offset must be >= 1");
  }
};

struct TestOutcome {
  double statistic = 0.0;
  double critical_value = 0.0;
  bool reject = false;
  std::vector<double> null_sample;
};

// min over orthogonal W of ||x - y W||_F.
inline double test_statistic(const spectral::EmbeddingMatrix& x,
                             const spectral::EmbeddingMatrix& y) {
  return spectral::procrustes(x.values, y.values).residual;
}

// Full-graph embeddings of a pair after matching correction: seed rows from
// the joint omnibus embedding, unseeded rows out-of-sample. Graph b's
// unseeded rows are corrected toward a's indexing — hard matching reorders
// them by the recovered permutation, soft(k) replaces each with the mean of
// its k nearest candidates.
inline std::pair<spectral::EmbeddingMatrix, spectral::EmbeddingMatrix>
corrected_embeddings(const core::Graph& a, const core::Graph& b,
                     const core::SeedSplit& split, int d, assign::MatchMethod method,
                     int k = 5, WarningLog* log = nullptr) {
  const std::vector<core::Graph> graphs{a, b};
  std::vector<core::Graph> seeds{core::induced_seed_subgraph(a, split),
                                 core::induced_seed_subgraph(b, split)};
  const auto seed_embs = omni::omni_embed(seeds, d, log);
  const auto oos_embs = oos::oos_embed_all(graphs, split, seed_embs, log);

  Eigen::MatrixXd corrected(split.u, d);
  if (split.u > 0) {
    assign::CostMatrix c = assign::cost_matrix(oos_embs[0], oos_embs[1]);
    if (method == assign::MatchMethod::hard) {
      const assign::MatchResult match = assign::solve_lap(c);
      for (int v = 0; v < split.u; ++v)
        corrected.row(v) = oos_embs[1].values.row(match.permutation(v));
    } else {
      const assign::SoftMatch sm = assign::soft_match(c, k);
      for (int v = 0; v < split.u; ++v) {
        Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(d);
        const auto& cands = sm.candidates[static_cast<std::size_t>(v)];
        for (const auto& cand : cands) mean += oos_embs[1].values.row(cand.target);
        corrected.row(v) = mean / static_cast<double>(cands.size());
      }
    }
  }

  auto assemble = [&](const spectral::EmbeddingMatrix& seed_emb,
                      const Eigen::MatrixXd& oos_rows,
                      const std::vector<char>& zero_rows,
                      int graph) {
    spectral::EmbeddingMatrix full;
    full.values.resize(split.n(), d);
    full.values.topRows(split.s) = seed_emb.values;
    full.values.bottomRows(split.u) = oos_rows;
    full.graph_index.assign(static_cast<std::size_t>(split.n()), graph);
    full.in_sample.assign(static_cast<std::size_t>(split.n()), 0);
    std::fill_n(full.in_sample.begin(), split.s, 1);
    full.zero_adjacency.assign(static_cast<std::size_t>(split.n()), 0);
    std::copy(zero_rows.begin(), zero_rows.end(),
              full.zero_adjacency.begin() + split.s);
    return full;
  };

  const std::vector<char> no_flags(static_cast<std::size_t>(split.u), 0);
  return {assemble(seed_embs[0], oos_embs[0].values, oos_embs[0].zero_adjacency, 0),
          assemble(seed_embs[1], corrected, no_flags, 1)};
}

// The ceil((1-alpha) * N)-th smallest value of the sample.
inline double critical_value(const std::vector<double>& null_sample, double alpha) {
  if (null_sample.empty())
    throw std::invalid_argument("critical_value: empty null sample");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("critical_value: alpha must be in (0, 1)");
  const auto n = static_cast<double>(null_sample.size());
  // Nudge before ceil so that exactly representable products ((1-a)*n
  // integral) do not round up a rank.
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * n - 1e-9));
  rank = std::min<std::size_t>(std::max<std::size_t>(rank, 1), null_sample.size());
  std::vector<double> sorted = null_sample;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                   sorted.end());
  return sorted[rank - 1];
}

inline TestOutcome evaluate_test(double statistic, std::vector<double> null_sample,
                                 double alpha) {
  TestOutcome outcome;
  outcome.statistic = statistic;
  outcome.critical_value = critical_value(null_sample, alpha);
  outcome.reject = statistic >= outcome.critical_value;
  outcome.null_sample = std::move(null_sample);
  return outcome;
}

struct PowerCell {
  double err = 0.0;
  int v1 = 0;
  double power = 0.0;
};

struct PowerStudyResult {
  double critical_value = 0.0;
  std::vector<double> null_sample;
  std::vector<PowerCell> cells;
};

namespace detail {

// Stream tags for derived generators; replicate r of each arm draws from an
// independent child stream so replicates parallelize deterministically.
constexpr std::uint64_t kNullArm = 0x6e756c6cull;     // "null"
constexpr std::uint64_t kAltArm = 0x616c74ull;        // "alt"
constexpr std::uint64_t kShuffle = 0x73687566ull;     // "shuf"

// One test-pipeline evaluation: draw the pair, shuffle the last
// shuffle_count vertices of B, and return the Procrustes statistic after
// correcting exactly that block (the displaced vertices are the unseeded
// set; everything else serves as seeds).
inline double replicate_statistic(const TestConfig& cfg, Rng model_rng, Rng shuffle_rng,
                                  int shuffle_count, bool perturb) {
  const core::SeedSplit split =
      core::SeedSplit::canonical(cfg.n - shuffle_count, shuffle_count);
  const models::LatentPositions x = models::sample_dirichlet_latents(
      cfg.n, cfg.d, cfg.d + cfg.dirichlet_offset, model_rng);
  const core::Graph a = models::sample_rdpg(x, model_rng);
  core::Graph b;
  if (perturb) {
    // Noise draws (uniform variant) land between A's and B's edge draws, so
    // B's stream stays seed-matched across err values either way.
    const models::LatentPositions y =
        cfg.uniform_noise ? models::perturb_latents_uniform(x, cfg.err, model_rng)
                          : models::perturb_latents(x, cfg.err);
    b = models::sample_rdpg(y, model_rng, /*clamp=*/true);
  } else {
    b = models::sample_rdpg(x, model_rng);
  }
  if (shuffle_count > 0) {
    const core::PermutationMap q = models::random_shuffle(shuffle_count, shuffle_rng);
    b = core::apply_shuffle(b, split, q);
  }
  WarningLog sink;  // per-replicate diagnostics are expected noise here
  const auto emb = corrected_embeddings(a, b, split, cfg.d, cfg.method, cfg.k, &sink);
  return test_statistic(emb.first, emb.second);
}

}  // namespace detail

// Monte-Carlo power study: n_mc null replicates (shared latent positions,
// independent pair, v0 shuffled vertices corrected) calibrate the critical
// value at alpha; each (err, v1) cell then reports the fraction of n_mc
// alternative replicates (B drawn from perturbed latents, v1 shuffled
// vertices corrected) at or above it. Alternative model draws reuse the
// same per-replicate streams for every cell, so cells are seed-matched in
// both err and v1.
inline PowerStudyResult run_power_study(const TestConfig& cfg, const Rng& base,
                                        int threads = 1) {
  cfg.validate();
  PowerStudyResult result;
  result.null_sample.resize(static_cast<std::size_t>(cfg.n_mc));
  const Rng null_arm = base.child(detail::kNullArm);
  const Rng alt_arm = base.child(detail::kAltArm);
  const Rng shuffle_arm = base.child(detail::kShuffle);

  parallel_for(static_cast<std::size_t>(cfg.n_mc), threads, [&](std::size_t r) {
    result.null_sample[r] = detail::replicate_statistic(
        cfg, null_arm.child(r), shuffle_arm.child(detail::kNullArm).child(r), cfg.v0,
        /*perturb=*/false);
  });
  result.critical_value = critical_value(result.null_sample, cfg.alpha);

  for (const int v1 : cfg.v1) {
    std::vector<double> stats(static_cast<std::size_t>(cfg.n_mc));
    parallel_for(static_cast<std::size_t>(cfg.n_mc), threads, [&](std::size_t r) {
      stats[r] = detail::replicate_statistic(
          cfg, alt_arm.child(r),
          shuffle_arm.child(static_cast<std::uint64_t>(v1)).child(r), v1,
          /*perturb=*/true);
    });
    int rejections = 0;
    for (const double s : stats)
      if (s >= result.critical_value) ++rejections;
    PowerCell cell;
    cell.err = cfg.err;
    cell.v1 = v1;
    cell.power = static_cast<double>(rejections) / cfg.n_mc;
    result.cells.push_back(cell);
  }
  return result;
}

inline PowerStudyResult run_power_study(const TestConfig& cfg, int threads = 1) {
  return run_power_study(cfg, Rng(cfg.seed), threads);
}

}  // namespace omnimatch::testing
