#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "omnimatch/models.hpp"
#include "omnimatch/rng.hpp"
#include "oracles.hpp"

using namespace omnimatch;

TEST_CASE("dirichlet latents live on the right scale", "[models]") {
  Rng rng(201);
  const models::LatentPositions x = models::sample_dirichlet_latents(2000, 1, 2, rng);
  REQUIRE(x.n == 2000);
  REQUIRE(x.d == 1);
  // First coordinate of a flat Dirichlet over 2 parts is Uniform(0,1)-mean.
  double sum = 0.0;
  for (int i = 0; i < x.n; ++i) {
    REQUIRE(x.values(i, 0) > 0.0);
    REQUIRE(x.values(i, 0) < 1.0);
    sum += x.values(i, 0);
  }
  REQUIRE(std::abs(sum / x.n - 0.5) < 0.03);  // sd/sqrt(n) ~ 0.0065, 4+ sigma

  // Coordinates of one draw never exceed the full simplex total.
  Rng rng2(202);
  const models::LatentPositions y = models::sample_dirichlet_latents(100, 3, 5, rng2);
  for (int i = 0; i < y.n; ++i) {
    double row = 0.0;
    for (int j = 0; j < y.d; ++j) {
      REQUIRE(y.values(i, j) > 0.0);
      row += y.values(i, j);
    }
    REQUIRE(row < 1.0);  // two coordinates of the length-5 draw were left out
  }
}

TEST_CASE("dirichlet latents keep inner products inside (0,1)", "[models]") {
  Rng rng(203);
  for (int rep = 0; rep < 5; ++rep) {
    const models::LatentPositions x =
        models::sample_dirichlet_latents(80, 2 + rep, 3 + rep, rng);
    const models::InnerProductAudit audit = models::audit_inner_products(x);
    REQUIRE(audit.min > 0.0);
    REQUIRE(audit.max < 1.0);
  }
}

TEST_CASE("model config validation", "[models]") {
  Rng rng(204);
  REQUIRE_THROWS_AS(models::sample_dirichlet_latents(0, 1, 2, rng),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(models::sample_dirichlet_latents(10, 0, 2, rng),
                    std::invalid_argument);
  // Concentration length must exceed d, else rows are full simplex vectors
  // and inner products can reach 1.
  REQUIRE_THROWS_AS(models::sample_dirichlet_latents(10, 2, 2, rng),
                    std::invalid_argument);
}

TEST_CASE("probability_matrix is the hollow gram matrix", "[models]") {
  models::LatentPositions x;
  x.n = 2;
  x.d = 2;
  x.values.resize(2, 2);
  x.values << 0.6, 0.8, 0.8, 0.6;
  const Eigen::MatrixXd p = models::probability_matrix(x);
  REQUIRE(p(0, 0) == 0.0);
  REQUIRE(p(1, 1) == 0.0);
  REQUIRE(p(0, 1) == Catch::Approx(0.96).margin(1e-15));
  REQUIRE(p(1, 0) == Catch::Approx(0.96).margin(1e-15));
}

TEST_CASE("rdpg sample matches its probability matrix in distribution", "[models]") {
  Rng latent_rng(205);
  const models::LatentPositions x = models::sample_dirichlet_latents(30, 2, 4, latent_rng);
  const Eigen::MatrixXd p = models::probability_matrix(x);

  Rng rng(206);
  Eigen::MatrixXd freq = Eigen::MatrixXd::Zero(30, 30);
  const int reps = 400;
  for (int rep = 0; rep < reps; ++rep) {
    const core::Graph g = models::sample_rdpg(x, rng);
    REQUIRE(g.is_binary);
    REQUIRE_NOTHROW(g.validate());
    freq += g.weights;
  }
  freq /= reps;
  // Every edge frequency within 5 binomial sigmas of its probability.
  for (int i = 0; i < 30; ++i)
    for (int j = i + 1; j < 30; ++j) {
      const double sd = std::sqrt(p(i, j) * (1.0 - p(i, j)) / reps);
      REQUIRE(std::abs(freq(i, j) - p(i, j)) <= 5.0 * sd + 1e-12);
    }
}

TEST_CASE("rdpg rejects out-of-range products unless told to clamp", "[models]") {
  models::LatentPositions big;
  big.n = 2;
  big.d = 1;
  big.values.resize(2, 1);
  big.values << 1.5, 1.0;  // inner product 1.5
  Rng rng(207);
  REQUIRE_THROWS_AS(models::sample_rdpg(big, rng), std::invalid_argument);
  const core::Graph g = models::sample_rdpg(big, rng, /*clamp=*/true);
  REQUIRE(g.weights(0, 1) == 1.0);  // clamped to probability 1
}

TEST_CASE("jrdpg draws are conditionally independent", "[models]") {
  Rng latent_rng(208);
  const models::LatentPositions x = models::sample_dirichlet_latents(40, 2, 4, latent_rng);
  Rng rng(209);
  const std::vector<core::Graph> graphs = models::sample_jrdpg(x, 2, rng);
  REQUIRE(graphs.size() == 2);

  // Conditional on x, paired edge indicators are independent: their sample
  // correlation over pairs should vanish like 1/sqrt(#pairs).
  const Eigen::MatrixXd p = models::probability_matrix(x);
  double num = 0.0, var0 = 0.0, var1 = 0.0;
  int pairs = 0;
  for (int i = 0; i < 40; ++i)
    for (int j = i + 1; j < 40; ++j) {
      const double e0 = graphs[0].weights(i, j) - p(i, j);
      const double e1 = graphs[1].weights(i, j) - p(i, j);
      num += e0 * e1;
      var0 += e0 * e0;
      var1 += e1 * e1;
      ++pairs;
    }
  const double corr = num / std::sqrt(var0 * var1);
  REQUIRE(std::abs(corr) < 4.0 / std::sqrt(static_cast<double>(pairs)));
  REQUIRE_THROWS_AS(models::sample_jrdpg(x, 0, rng), std::invalid_argument);
}

TEST_CASE("perturb_latents shifts every coordinate by err", "[models]") {
  Rng rng(210);
  const models::LatentPositions x = models::sample_dirichlet_latents(10, 2, 4, rng);
  const models::LatentPositions y = models::perturb_latents(x, 0.05);
  REQUIRE(oracles::exact_equal(y.values, (x.values.array() + 0.05).matrix()));
  REQUIRE(oracles::exact_equal(models::perturb_latents(x, 0.0).values, x.values));
  REQUIRE_THROWS_AS(models::perturb_latents(x, -0.1), std::invalid_argument);
}

TEST_CASE("perturb_latents_uniform adds bounded positive noise", "[models]") {
  Rng rng(211);
  const models::LatentPositions x = models::sample_dirichlet_latents(50, 3, 5, rng);
  Rng noise(212);
  const models::LatentPositions y = models::perturb_latents_uniform(x, 0.1, noise);
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.d; ++j) {
      const double diff = y.values(i, j) - x.values(i, j);
      REQUIRE(diff >= 0.0);
      REQUIRE(diff < 0.1);
    }
  REQUIRE_THROWS_AS(models::perturb_latents_uniform(x, -0.1, noise),
                    std::invalid_argument);
}

TEST_CASE("larger perturbations push edge probabilities further", "[models]") {
  Rng rng(213);
  const models::LatentPositions x = models::sample_dirichlet_latents(20, 2, 4, rng);
  const Eigen::MatrixXd p = models::probability_matrix(x);
  double prev = 0.0;
  for (const double err : {0.01, 0.05, 0.1}) {
    const models::LatentPositions y = models::perturb_latents(x, err);
    const double shift = (models::probability_matrix(y) - p).cwiseAbs().maxCoeff();
    REQUIRE(shift > prev);
    prev = shift;
  }
}

TEST_CASE("random_shuffle yields valid, uniform permutations", "[models]") {
  Rng rng(214);
  const core::PermutationMap q = models::random_shuffle(8, rng);
  REQUIRE(q.size == 8);
  REQUIRE_NOTHROW(q.validate());
  REQUIRE_THROWS_AS(models::random_shuffle(0, rng), std::invalid_argument);

  // Position of element 0 should be uniform over the 8 slots.
  std::vector<int> counts(8, 0);
  const int draws = 8000;
  for (int i = 0; i < draws; ++i)
    ++counts[static_cast<std::size_t>(models::random_shuffle(8, rng)(0))];
  for (int c : counts) REQUIRE(std::abs(c - 1000) < 160);  // sd ~ 30, 5 sigma
}

TEST_CASE("perturb_probabilities hits exactly the incident entries", "[models]") {
  Rng rng(215);
  const models::LatentPositions x = models::sample_dirichlet_latents(6, 2, 4, rng);
  const Eigen::MatrixXd p = models::probability_matrix(x);
  const Eigen::MatrixXd out = models::perturb_probabilities(p, {1, 3}, 0.2);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      if (i == j) {
        REQUIRE(out(i, j) == 0.0);
      } else if (i == 1 || j == 1 || i == 3 || j == 3) {
        REQUIRE(out(i, j) == Catch::Approx(std::min(1.0, p(i, j) + 0.2)).margin(1e-15));
      } else {
        REQUIRE(out(i, j) == p(i, j));
      }
    }
  REQUIRE_THROWS_AS(models::perturb_probabilities(p, {6}, 0.2), std::invalid_argument);

  // Clamping: a probability already close to 1 stays at 1.
  Eigen::MatrixXd high = Eigen::MatrixXd::Constant(3, 3, 0.95);
  high.diagonal().setZero();
  const Eigen::MatrixXd clamped = models::perturb_probabilities(high, {0}, 0.2);
  REQUIRE(clamped(0, 1) == 1.0);
  REQUIRE(clamped(1, 2) == 0.95);
}

TEST_CASE("sample_bernoulli_graph respects degenerate probabilities", "[models]") {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(4, 4);
  p(0, 1) = p(1, 0) = 1.0;
  Rng rng(216);
  const core::Graph g = models::sample_bernoulli_graph(p, rng);
  REQUIRE(g.weights(0, 1) == 1.0);
  REQUIRE(g.weights(2, 3) == 0.0);
  REQUIRE_NOTHROW(g.validate());

  Eigen::MatrixXd bad = p;
  bad(2, 3) = bad(3, 2) = 1.5;
  REQUIRE_THROWS_AS(models::sample_bernoulli_graph(bad, rng), std::invalid_argument);
}

TEST_CASE("graph density tracks the mean probability", "[models]") {
  Rng rng(217);
  const models::LatentPositions x = models::sample_dirichlet_latents(200, 2, 4, rng);
  const Eigen::MatrixXd p = models::probability_matrix(x);
  double mean_p = 0.0;
  const double pairs = 200.0 * 199.0 / 2.0;
  for (int i = 0; i < 200; ++i)
    for (int j = i + 1; j < 200; ++j) mean_p += p(i, j);
  mean_p /= pairs;

  double mean_density = 0.0;
  const int reps = 20;
  for (int rep = 0; rep < reps; ++rep) {
    const core::Graph g = models::sample_rdpg(x, rng);
    mean_density += g.weights.sum() / 2.0 / pairs;
  }
  mean_density /= reps;
  REQUIRE(std::abs(mean_density - mean_p) < 0.01);
}
