#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "omnimatch/graph.hpp"
#include "omnimatch/rng.hpp"
#include "oracles.hpp"

using namespace omnimatch;

namespace {

core::Graph triangle() {
  Eigen::MatrixXd w(3, 3);
  w << 0, 1, 1, 1, 0, 1, 1, 1, 0;
  return core::Graph(std::move(w), true);
}

}  // namespace

TEST_CASE("Graph::validate accepts well-formed graphs", "[graph]") {
  REQUIRE_NOTHROW(triangle().validate());
  Eigen::MatrixXd w(2, 2);
  w << 0, 0.5, 0.5, 0;
  REQUIRE_NOTHROW(core::Graph(std::move(w), false).validate());
}

TEST_CASE("Graph::validate rejects structural violations", "[graph]") {
  core::Graph g = triangle();
  g.weights(0, 1) = 0.0;  // asymmetric now
  REQUIRE_THROWS_AS(g.validate(), std::invalid_argument);

  core::Graph loop = triangle();
  loop.weights(2, 2) = 1.0;
  REQUIRE_THROWS_AS(loop.validate(), std::invalid_argument);

  core::Graph weighted = triangle();
  weighted.weights(0, 1) = 0.5;
  weighted.weights(1, 0) = 0.5;
  REQUIRE_THROWS_AS(weighted.validate(), std::invalid_argument);  // binary flag lies
  weighted.is_binary = false;
  REQUIRE_NOTHROW(weighted.validate());

  core::Graph bad_shape;
  bad_shape.n = 3;
  bad_shape.weights = Eigen::MatrixXd::Zero(2, 2);
  REQUIRE_THROWS_AS(bad_shape.validate(), std::invalid_argument);
}

TEST_CASE("PermutationMap validates bijections and inverts", "[graph]") {
  const core::PermutationMap p = oracles::perm_of({2, 0, 1});
  REQUIRE_NOTHROW(p.validate());
  REQUIRE(p(0) == 2);
  const core::PermutationMap inv = p.inverse();
  REQUIRE(inv.image == std::vector<int>{1, 2, 0});
  REQUIRE(core::compose(p, inv).is_identity());
  REQUIRE(core::compose(inv, p).is_identity());

  REQUIRE_THROWS_AS(oracles::perm_of({0, 0, 1}).validate(), std::invalid_argument);
  REQUIRE_THROWS_AS(oracles::perm_of({0, 3, 1}).validate(), std::invalid_argument);
  core::PermutationMap short_image = oracles::perm_of({0, 1});
  short_image.size = 3;
  REQUIRE_THROWS_AS(short_image.validate(), std::invalid_argument);
}

TEST_CASE("compose applies p then q", "[graph]") {
  const core::PermutationMap swap01 = oracles::perm_of({1, 0, 2});
  const core::PermutationMap swap12 = oracles::perm_of({0, 2, 1});
  // i -> swap01 -> swap12: 0 -> 1 -> 2, 1 -> 0 -> 0, 2 -> 2 -> 1.
  REQUIRE(core::compose(swap01, swap12).image == std::vector<int>{2, 0, 1});
  REQUIRE(core::compose(swap12, swap01).image == std::vector<int>{1, 2, 0});
  REQUIRE_THROWS_AS(core::compose(swap01, oracles::perm_of({1, 0})),
                    std::invalid_argument);
}

TEST_CASE("compose is associative on random permutations", "[graph]") {
  Rng rng(31);
  for (int rep = 0; rep < 30; ++rep) {
    const auto p = oracles::perm_of(shuffled_indices(8, rng));
    const auto q = oracles::perm_of(shuffled_indices(8, rng));
    const auto r = oracles::perm_of(shuffled_indices(8, rng));
    REQUIRE(core::compose(core::compose(p, q), r).image ==
            core::compose(p, core::compose(q, r)).image);
  }
}

TEST_CASE("SeedSplit canonical layout and validation", "[graph]") {
  const core::SeedSplit split = core::SeedSplit::canonical(3, 2);
  REQUIRE(split.n() == 5);
  REQUIRE(split.is_canonical());
  REQUIRE_NOTHROW(split.validate());
  REQUIRE(split.seed_ids == std::vector<int>{0, 1, 2});
  REQUIRE(split.unseeded_ids == std::vector<int>{3, 4});
  REQUIRE_THROWS_AS(core::SeedSplit::canonical(-1, 2), std::invalid_argument);

  core::SeedSplit scrambled = split;
  std::swap(scrambled.seed_ids[0], scrambled.unseeded_ids[0]);
  REQUIRE_NOTHROW(scrambled.validate());  // still a partition
  REQUIRE_FALSE(scrambled.is_canonical());

  core::SeedSplit overlapping = split;
  overlapping.unseeded_ids[0] = 0;
  REQUIRE_THROWS_AS(overlapping.validate(), std::invalid_argument);
}

TEST_CASE("apply_shuffle moves vertex a to f(a) and keeps seeds fixed", "[graph]") {
  // Path 0-1-2-3 with seeds {0,1}: shuffling unseeded block by the swap
  // q = (1 0) exchanges vertices 2 and 3.
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
  w(0, 1) = w(1, 0) = 1.0;
  w(1, 2) = w(2, 1) = 1.0;
  w(2, 3) = w(3, 2) = 1.0;
  const core::Graph g(std::move(w), true);
  const core::SeedSplit split = core::SeedSplit::canonical(2, 2);
  const core::Graph shuffled = core::apply_shuffle(g, split, oracles::perm_of({1, 0}));
  // Vertex 2 (adjacent to seed 1) landed at position 3.
  REQUIRE(shuffled.weights(1, 3) == 1.0);
  REQUIRE(shuffled.weights(1, 2) == 0.0);
  REQUIRE(shuffled.weights(2, 3) == 1.0);  // the 2-3 edge survives the swap
  REQUIRE(shuffled.weights(0, 1) == 1.0);  // seed block untouched
  REQUIRE_NOTHROW(shuffled.validate());
}

TEST_CASE("apply_shuffle round-trips through the inverse", "[graph]") {
  Rng rng(37);
  for (int rep = 0; rep < 20; ++rep) {
    const core::Graph g = oracles::random_graph(12, 0.4, rng);
    const core::SeedSplit split = core::SeedSplit::canonical(5, 7);
    const auto q = oracles::perm_of(shuffled_indices(7, rng));
    const core::Graph there = core::apply_shuffle(g, split, q);
    const core::Graph back = core::apply_shuffle(there, split, q.inverse());
    REQUIRE(oracles::exact_equal(back.weights, g.weights));
  }
}

TEST_CASE("apply_shuffle validates its inputs", "[graph]") {
  const core::Graph g = triangle();
  const core::SeedSplit split = core::SeedSplit::canonical(1, 2);
  REQUIRE_THROWS_AS(core::apply_shuffle(g, split, oracles::perm_of({0})),
                    std::invalid_argument);  // size mismatch
  REQUIRE_THROWS_AS(
      core::apply_shuffle(g, core::SeedSplit::canonical(1, 1), oracles::perm_of({0})),
      std::invalid_argument);  // split does not cover the graph
  core::SeedSplit scrambled = split;
  std::swap(scrambled.seed_ids[0], scrambled.unseeded_ids[0]);
  REQUIRE_THROWS_AS(core::apply_shuffle(g, scrambled, oracles::perm_of({0, 1})),
                    std::invalid_argument);  // non-canonical layout
}

TEST_CASE("induced_seed_subgraph takes the top-left block", "[graph]") {
  Rng rng(41);
  const core::Graph g = oracles::random_graph(10, 0.5, rng);
  const core::SeedSplit split = core::SeedSplit::canonical(4, 6);
  const core::Graph seeds = core::induced_seed_subgraph(g, split);
  REQUIRE(seeds.n == 4);
  REQUIRE(oracles::exact_equal(seeds.weights, g.weights.topLeftCorner(4, 4)));
  REQUIRE(seeds.is_binary == g.is_binary);
}

TEST_CASE("seed subgraph commutes with unseeded shuffles", "[graph]") {
  Rng rng(43);
  for (int rep = 0; rep < 20; ++rep) {
    const core::Graph g = oracles::random_graph(11, 0.3, rng);
    const core::SeedSplit split = core::SeedSplit::canonical(6, 5);
    const auto q = oracles::perm_of(shuffled_indices(5, rng));
    const core::Graph shuffled = core::apply_shuffle(g, split, q);
    REQUIRE(oracles::exact_equal(core::induced_seed_subgraph(shuffled, split).weights,
                                 core::induced_seed_subgraph(g, split).weights));
  }
}
