#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "omnimatch/rng.hpp"
#include "omnimatch/spectral.hpp"
#include "omnimatch/warnings.hpp"
#include "oracles.hpp"

using namespace omnimatch;

namespace {

Eigen::MatrixXd cycle3() {
  Eigen::MatrixXd a(3, 3);
  a << 0, 1, 1, 1, 0, 1, 1, 1, 0;
  return a;
}

Eigen::MatrixXd random_orthogonal(int d, Rng& rng) {
  const Eigen::MatrixXd m = oracles::random_matrix(d, d, rng, -1.0, 1.0);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ();
}

}  // namespace

TEST_CASE("eig_symmetric on the 3-cycle", "[spectral]") {
  const spectral::Spectrum spec = spectral::eig_symmetric(cycle3());
  REQUIRE(spec.eigenvalues.size() == 3);
  // Spectrum of K_3: 2, -1, -1; magnitude order puts 2 first.
  REQUIRE(spec.eigenvalues[0] == Catch::Approx(2.0).margin(1e-12));
  REQUIRE(spec.eigenvalues[1] == Catch::Approx(-1.0).margin(1e-12));
  REQUIRE(spec.eigenvalues[2] == Catch::Approx(-1.0).margin(1e-12));
  // Leading eigenvector is the all-ones direction, sign-fixed positive.
  const double entry = 1.0 / std::sqrt(3.0);
  for (int i = 0; i < 3; ++i)
    REQUIRE(spec.eigenvectors(i, 0) == Catch::Approx(entry).margin(1e-12));
}

TEST_CASE("eig_symmetric reconstructs and is orthonormal", "[spectral]") {
  Rng rng(101);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::MatrixXd a = oracles::random_symmetric(20, rng);
    const spectral::Spectrum spec = spectral::eig_symmetric(a);
    const Eigen::MatrixXd rebuilt = spec.eigenvectors *
                                    spec.eigenvalues.asDiagonal() *
                                    spec.eigenvectors.transpose();
    REQUIRE((rebuilt - a).norm() <= 1e-7 * std::max(1.0, a.norm()));
    const Eigen::MatrixXd gram =
        spec.eigenvectors.transpose() * spec.eigenvectors;
    REQUIRE((gram - Eigen::MatrixXd::Identity(20, 20)).norm() < 1e-9);
    for (int i = 0; i + 1 < 20; ++i)
      REQUIRE(std::abs(spec.eigenvalues[i]) >= std::abs(spec.eigenvalues[i + 1]) - 1e-12);
    for (int j = 0; j < 20; ++j) {
      Eigen::Index arg;
      spec.eigenvectors.col(j).cwiseAbs().maxCoeff(&arg);
      REQUIRE(spec.eigenvectors(arg, j) > 0.0);
    }
  }
  REQUIRE_THROWS_AS(spectral::eig_symmetric(oracles::random_matrix(4, 4, rng)),
                    std::invalid_argument);
}

TEST_CASE("top_magnitude_spectrum agrees with the full decomposition", "[spectral]") {
  Rng rng(103);
  // n = 300 with k = 3 exercises the two-sided range path; n = 40 the full path.
  for (const int n : {40, 300}) {
    const Eigen::MatrixXd a = oracles::random_symmetric(n, rng);
    const spectral::Spectrum full = spectral::eig_symmetric(a);
    const spectral::Spectrum top = spectral::top_magnitude_spectrum(a, 3);
    for (int i = 0; i < 3; ++i) {
      REQUIRE(top.eigenvalues[i] == Catch::Approx(full.eigenvalues[i]).margin(1e-8));
      REQUIRE((top.eigenvectors.col(i) - full.eigenvectors.col(i)).norm() < 1e-6);
    }
  }
  REQUIRE_THROWS_AS(spectral::top_magnitude_spectrum(cycle3(), 0), std::invalid_argument);
  REQUIRE_THROWS_AS(spectral::top_magnitude_spectrum(cycle3(), 4), std::invalid_argument);
}

TEST_CASE("ase of the 3-cycle at d=1", "[spectral]") {
  const spectral::EmbeddingMatrix emb = spectral::ase(cycle3(), 1);
  REQUIRE(emb.rows() == 3);
  REQUIRE(emb.d() == 1);
  const double expected = std::sqrt(2.0 / 3.0);
  for (int i = 0; i < 3; ++i)
    REQUIRE(emb.values(i, 0) == Catch::Approx(expected).margin(1e-8));
  for (int i = 0; i < 3; ++i) {
    REQUIRE(emb.graph_index[static_cast<std::size_t>(i)] == 0);
    REQUIRE(emb.in_sample[static_cast<std::size_t>(i)] == 1);
    REQUIRE(emb.zero_adjacency[static_cast<std::size_t>(i)] == 0);
  }
}

TEST_CASE("ase recovers a known rank-1 factor", "[spectral]") {
  Eigen::VectorXd x(2);
  x << 0.6, 0.8;
  const Eigen::MatrixXd p = x * x.transpose();
  const spectral::EmbeddingMatrix emb = spectral::ase(p, 1);
  REQUIRE(emb.values(0, 0) == Catch::Approx(0.6).margin(1e-12));
  REQUIRE(emb.values(1, 0) == Catch::Approx(0.8).margin(1e-12));
}

TEST_CASE("ase recovers a rank-d gram matrix up to rotation", "[spectral]") {
  Rng rng(107);
  for (int rep = 0; rep < 5; ++rep) {
    const Eigen::MatrixXd x = oracles::random_matrix(50, 2, rng, 0.1, 0.7);
    const Eigen::MatrixXd p = x * x.transpose();
    const spectral::EmbeddingMatrix emb = spectral::ase(p, 2);
    REQUIRE((emb.values * emb.values.transpose() - p).norm() <=
            1e-6 * std::max(1.0, p.norm()));
  }
}

TEST_CASE("ase flags degenerate spectra and rejects bad dimensions", "[spectral]") {
  WarningLog log;
  Eigen::VectorXd diag(4);
  diag << 2.0, 1.0, 1.0, 0.1;
  (void)spectral::ase(Eigen::MatrixXd(diag.asDiagonal()), 2, &log);
  REQUIRE(log.messages().size() == 1);
  REQUIRE(log.messages()[0].find("coincide") != std::string::npos);

  log.clear();
  Eigen::VectorXd diag0(3);
  diag0 << 1.0, 0.0, 0.0;
  (void)spectral::ase(Eigen::MatrixXd(diag0.asDiagonal()), 2, &log);
  REQUIRE_FALSE(log.empty());
  bool saw_zero = false;
  for (const auto& msg : log.messages())
    if (msg.find("zero eigenvalue") != std::string::npos) saw_zero = true;
  REQUIRE(saw_zero);

  REQUIRE_THROWS_AS(spectral::ase(cycle3(), 0), std::invalid_argument);
  REQUIRE_THROWS_AS(spectral::ase(cycle3(), 4), std::invalid_argument);
}

TEST_CASE("select_dimension frozen elbows", "[spectral]") {
  Eigen::VectorXd mags(5);
  mags << 100.0, 99.0, 1.0, 0.9, 0.8;
  REQUIRE(spectral::select_dimension(mags, 10) == 2);

  Eigen::VectorXd two(2);
  two << 10.0, 1.0;
  REQUIRE(spectral::select_dimension(two, 10) == 1);

  // max_d caps the elbow after the fact.
  REQUIRE(spectral::select_dimension(mags, 1) == 1);

  WarningLog log;
  Eigen::VectorXd flat = Eigen::VectorXd::Constant(4, 5.0);
  REQUIRE(spectral::select_dimension(flat, 10, 1, &log) == 1);
  REQUIRE_FALSE(log.empty());
}

TEST_CASE("select_dimension matches the profile-likelihood oracle", "[spectral]") {
  Rng rng(109);
  for (int rep = 0; rep < 200; ++rep) {
    const int len = 3 + static_cast<int>(rng.uniform_below(15));
    std::vector<double> mags(static_cast<std::size_t>(len));
    for (auto& v : mags) v = 10.0 * rng.uniform01();
    std::sort(mags.begin(), mags.end(), std::greater<>());
    if (mags.front() == mags.back()) continue;  // constant scree handled above
    Eigen::VectorXd vec(len);
    for (int i = 0; i < len; ++i) vec[i] = mags[static_cast<std::size_t>(i)];
    REQUIRE(spectral::select_dimension(vec, len) ==
            oracles::profile_likelihood_elbow(mags));
  }
}

TEST_CASE("select_dimension is scale invariant", "[spectral]") {
  Rng rng(113);
  for (int rep = 0; rep < 50; ++rep) {
    const int len = 4 + static_cast<int>(rng.uniform_below(10));
    Eigen::VectorXd mags(len);
    for (int i = 0; i < len; ++i) mags[i] = 5.0 * rng.uniform01();
    std::sort(mags.data(), mags.data() + len, std::greater<>());
    const int base = spectral::select_dimension(mags, len);
    REQUIRE(spectral::select_dimension((1000.0 * mags).eval(), len) == base);
    REQUIRE(spectral::select_dimension((0.001 * mags).eval(), len) == base);
  }
}

TEST_CASE("select_dimension later elbows and input validation", "[spectral]") {
  Rng rng(127);
  for (int rep = 0; rep < 50; ++rep) {
    const int len = 6 + static_cast<int>(rng.uniform_below(10));
    std::vector<double> mags(static_cast<std::size_t>(len));
    for (auto& v : mags) v = 10.0 * rng.uniform01();
    std::sort(mags.begin(), mags.end(), std::greater<>());
    if (mags.front() == mags.back()) continue;
    Eigen::VectorXd vec(len);
    for (int i = 0; i < len; ++i) vec[i] = mags[static_cast<std::size_t>(i)];
    // Second elbow = first elbow of the tail past the first one.
    const int first = oracles::profile_likelihood_elbow(mags);
    int expected = first;
    if (len - first >= 2) {
      const std::vector<double> tail(mags.begin() + first, mags.end());
      expected = first + oracles::profile_likelihood_elbow(tail);
    }
    REQUIRE(spectral::select_dimension(vec, len, 2) == expected);
  }

  Eigen::VectorXd unsorted(3);
  unsorted << 1.0, 2.0, 0.5;
  REQUIRE_THROWS_AS(spectral::select_dimension(unsorted, 3), std::invalid_argument);
  Eigen::VectorXd negative(3);
  negative << 2.0, 1.0, -0.5;
  REQUIRE_THROWS_AS(spectral::select_dimension(negative, 3), std::invalid_argument);
  Eigen::VectorXd single(1);
  single << 1.0;
  REQUIRE_THROWS_AS(spectral::select_dimension(single, 3), std::invalid_argument);
  Eigen::VectorXd ok(3);
  ok << 2.0, 1.0, 0.5;
  REQUIRE_THROWS_AS(spectral::select_dimension(ok, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(spectral::select_dimension(ok, 3, 0), std::invalid_argument);
}

TEST_CASE("procrustes solves a known rotation exactly", "[spectral]") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd y(2, 2);
  y << 0, 1, -1, 0;
  const spectral::ProcrustesRotation rot = spectral::procrustes(x, y);
  REQUIRE(rot.residual == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(rot.w(0, 0) == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(rot.w(0, 1) == Catch::Approx(-1.0).margin(1e-12));
  REQUIRE(rot.w(1, 0) == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(rot.w(1, 1) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("procrustes residual is invariant to orthogonal maps", "[spectral]") {
  Rng rng(131);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::MatrixXd x = oracles::random_matrix(30, 3, rng, -1.0, 1.0);
    const Eigen::MatrixXd q = random_orthogonal(3, rng);
    const spectral::ProcrustesRotation rot = spectral::procrustes(x, x * q);
    REQUIRE(rot.residual < 1e-8);
    REQUIRE((rot.w.transpose() * rot.w - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-10);

    // Residual between two random clouds is unchanged by rotating either.
    const Eigen::MatrixXd y = oracles::random_matrix(30, 3, rng, -1.0, 1.0);
    const double base = spectral::procrustes(x, y).residual;
    REQUIRE(spectral::procrustes(x, y * q).residual == Catch::Approx(base).margin(1e-8));
  }
  REQUIRE_THROWS_AS(
      spectral::procrustes(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(3, 2)),
      std::invalid_argument);
}
