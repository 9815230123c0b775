#pragma once

#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "omnimatch/errors.hpp"
#include "omnimatch/warnings.hpp"

namespace omnimatch::spectral {

// Eigenpairs sorted by |eigenvalue| descending (ties: larger eigenvalue
// first); eigenvector signs are fixed so each vector's largest-magnitude
// entry is positive, making every downstream embedding deterministic.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // matching orthonormal columns
};

// n x d latent-position estimates. graph_index / in_sample are per-row
// provenance (which of the m graphs a row came from, and whether it was
// embedded in-sample or out-of-sample); zero_adjacency marks out-of-sample
// rows whose regression target was the zero vector (unidentifiable).
struct EmbeddingMatrix {
  Eigen::MatrixXd values;
  std::vector<int> graph_index;
  std::vector<char> in_sample;
  std::vector<char> zero_adjacency;

  int rows() const { return static_cast<int>(values.rows()); }
  int d() const { return static_cast<int>(values.cols()); }
};

struct ProcrustesRotation {
  Eigen::MatrixXd w;  // d x d orthogonal
  double residual = 0.0;
};

namespace detail {

inline void require_symmetric(const Eigen::MatrixXd& mat, const char* where) {
  if (mat.rows() != mat.cols())
    throw std::invalid_argument(std::string(where) + ": matrix must be square");
  double worst = 0.0;
  for (Eigen::Index j = 0; j < mat.cols(); ++j)
    for (Eigen::Index i = j + 1; i < mat.rows(); ++i)
      worst = std::max(worst, std::abs(mat(i, j) - mat(j, i)));
  if (worst > 1e-10)
    throw std::invalid_argument(std::string(where) +
                                ": matrix not symmetric (max asymmetry " +
                                std::to_string(worst) + ")");
}

// Largest-magnitude entry positive; ties broken by the earliest such entry.
inline void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index arg = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best) {
      best = a;
      arg = i;
    }
  }
  if (v[arg] < 0.0) v = -v;
}

// Order candidate eigenpairs by |lambda| descending, positive first on ties.
inline std::vector<int> magnitude_order(const Eigen::VectorXd& vals) {
  std::vector<int> order(static_cast<std::size_t>(vals.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = std::abs(vals[a]), mb = std::abs(vals[b]);
    if (ma != mb) return ma > mb;
    return vals[a] > vals[b];
  });
  return order;
}

// Full symmetric eigendecomposition via LAPACK dsyevd (divide & conquer).
// Returns ascending eigenvalues in vals, vectors in the columns of vecs.
inline void dsyevd_full(const Eigen::MatrixXd& mat, Eigen::VectorXd& vals,
                        Eigen::MatrixXd& vecs) {
  const auto n = static_cast<lapack_int>(mat.rows());
  vecs = mat;  // overwritten with eigenvectors
  vals.resize(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                         vecs.data(), n, vals.data());
  if (info != 0)
    throw omnimatch::NumericFailureError(
        "eig_symmetric: LAPACK dsyevd failed with info=" + std::to_string(info));
}

// The k algebraically largest or smallest eigenpairs via dsyevr.
inline void dsyevr_range(const Eigen::MatrixXd& mat, int k, bool largest,
                         Eigen::VectorXd& vals, Eigen::MatrixXd& vecs) {
  const auto n = static_cast<lapack_int>(mat.rows());
  Eigen::MatrixXd work = mat;  // dsyevr destroys its input
  const lapack_int il = largest ? n - k + 1 : 1;
  const lapack_int iu = largest ? n : k;
  vals.resize(n);
  vecs.resize(n, k);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(std::max(1, k)));
  lapack_int found = 0;
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, work.data(), n, 0.0, 0.0,
                     il, iu, 0.0, &found, vals.data(), vecs.data(), n, isuppz.data());
  if (info != 0 || found != k)
    throw omnimatch::NumericFailureError(
        "top_magnitude_spectrum: LAPACK dsyevr failed (info=" + std::to_string(info) +
        ", found=" + std::to_string(found) + ")");
  vals.conservativeResize(k);
}

}  // namespace detail

// Full spectrum, |lambda|-descending, signs fixed. pre: symmetric within 1e-10.
inline Spectrum eig_symmetric(const Eigen::MatrixXd& mat) {
  detail::require_symmetric(mat, "eig_symmetric");
  Eigen::VectorXd vals;
  Eigen::MatrixXd vecs;
  detail::dsyevd_full(mat, vals, vecs);
  const auto order = detail::magnitude_order(vals);
  Spectrum out;
  const auto n = mat.rows();
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.eigenvalues[i] = vals[order[static_cast<std::size_t>(i)]];
    out.eigenvectors.col(i) = vecs.col(order[static_cast<std::size_t>(i)]);
    detail::fix_sign(out.eigenvectors.col(i));
  }
  return out;
}

// The k largest-|lambda| eigenpairs. Uses two dsyevr index-range queries
// (k from each end of the algebraic order always contain the k largest
// magnitudes) when that is cheaper than a full decomposition.
inline Spectrum top_magnitude_spectrum(const Eigen::MatrixXd& mat, int k) {
  detail::require_symmetric(mat, "top_magnitude_spectrum");
  const auto n = static_cast<int>(mat.rows());
  if (k < 1 || k > n)
    throw std::invalid_argument("top_magnitude_spectrum: k out of range");

  Eigen::VectorXd vals;
  Eigen::MatrixXd vecs;
  if (n < 256 || 2 * k >= n) {
    detail::dsyevd_full(mat, vals, vecs);
  } else {
    Eigen::VectorXd hi_vals, lo_vals;
    Eigen::MatrixXd hi_vecs, lo_vecs;
    detail::dsyevr_range(mat, k, /*largest=*/true, hi_vals, hi_vecs);
    detail::dsyevr_range(mat, k, /*largest=*/false, lo_vals, lo_vecs);
    vals.resize(2 * k);
    vals << lo_vals, hi_vals;
    vecs.resize(n, 2 * k);
    vecs << lo_vecs, hi_vecs;
  }

  const auto order = detail::magnitude_order(vals);
  Spectrum out;
  out.eigenvalues.resize(k);
  out.eigenvectors.resize(n, k);
  for (int i = 0; i < k; ++i) {
    out.eigenvalues[i] = vals[order[static_cast<std::size_t>(i)]];
    out.eigenvectors.col(i) = vecs.col(order[static_cast<std::size_t>(i)]);
    detail::fix_sign(out.eigenvectors.col(i));
  }
  return out;
}

// Adjacency spectral embedding: U_d * diag(sqrt(|lambda_d|)) over the d
// largest-magnitude eigenvalues. Works unchanged on indefinite matrices
// (weighted or omnibus input) because magnitudes are used.
inline EmbeddingMatrix ase(const Eigen::MatrixXd& mat, int d,
                           WarningLog* log = nullptr) {
  const auto n = static_cast<int>(mat.rows());
  if (d < 1) throw std::invalid_argument("ase: d must be >= 1");
  if (d > n)
    throw std::invalid_argument("ase: d=" + std::to_string(d) + " exceeds n=" +
                                std::to_string(n));
  const int k = std::min(d + 1, n);  // one extra pair to audit the eigengap
  const Spectrum top = top_magnitude_spectrum(mat, k);

  if (k > d &&
      std::abs(std::abs(top.eigenvalues[d - 1]) - std::abs(top.eigenvalues[d])) <= 1e-12)
    warn_to(log, "ase: eigenvalue magnitudes " + std::to_string(d) + " and " +
                     std::to_string(d + 1) +
                     " coincide; embedding subspace choice is arbitrary");
  if (std::abs(top.eigenvalues[d - 1]) == 0.0)
    warn_to(log, "ase: zero eigenvalue inside the embedding range; "
                 "embedding is degenerate");

  EmbeddingMatrix emb;
  emb.values.resize(n, d);
  for (int j = 0; j < d; ++j)
    emb.values.col(j) =
        top.eigenvectors.col(j) * std::sqrt(std::abs(top.eigenvalues[j]));
  emb.graph_index.assign(static_cast<std::size_t>(n), 0);
  emb.in_sample.assign(static_cast<std::size_t>(n), 1);
  emb.zero_adjacency.assign(static_cast<std::size_t>(n), 0);
  return emb;
}

namespace detail {

// Zhu-Ghodsi profile likelihood: split the scree at q, fit one normal per
// group with a pooled MLE variance; the best split minimizes that variance.
// A zero-variance split is a perfect elbow (likelihood diverges).
inline int zhu_ghodsi_elbow(const double* mags, int len) {
  int best_q = 1;
  double best_var = std::numeric_limits<double>::infinity();
  for (int q = 1; q < len; ++q) {
    double mean1 = 0.0, mean2 = 0.0;
    for (int i = 0; i < q; ++i) mean1 += mags[i];
    for (int i = q; i < len; ++i) mean2 += mags[i];
    mean1 /= q;
    mean2 /= (len - q);
    double ss = 0.0;
    for (int i = 0; i < q; ++i) ss += (mags[i] - mean1) * (mags[i] - mean1);
    for (int i = q; i < len; ++i) ss += (mags[i] - mean2) * (mags[i] - mean2);
    const double var = ss / len;
    if (var < best_var) {  // strict: ties keep the smallest q
      best_var = var;
      best_q = q;
    }
  }
  return best_q;
}

}  // namespace detail

// Scree-elbow dimension selection on a descending magnitude list, capped at
// max_d. elbow_index > 1 re-runs the search on the tail past each elbow
// (second elbow, third elbow, ...).
inline int select_dimension(const Eigen::VectorXd& magnitudes, int max_d,
                            int elbow_index = 1, WarningLog* log = nullptr) {
  const auto p = static_cast<int>(magnitudes.size());
  if (p < 2)
    throw std::invalid_argument("select_dimension: need at least 2 eigenvalue magnitudes");
  if (max_d < 1) throw std::invalid_argument("select_dimension: max_d must be >= 1");
  if (elbow_index < 1)
    throw std::invalid_argument("select_dimension: elbow_index must be >= 1");
  for (int i = 0; i + 1 < p; ++i)
    if (magnitudes[i] < magnitudes[i + 1])
      throw std::invalid_argument(
          "select_dimension: magnitudes must be sorted descending");
  if (magnitudes[p - 1] < 0.0)
    throw std::invalid_argument("select_dimension: magnitudes must be nonnegative");

  if (magnitudes[0] == magnitudes[p - 1]) {
    warn_to(log, "select_dimension: constant scree has no elbow; returning 1");
    return 1;
  }

  int offset = 0;
  int elbow = 1;
  for (int e = 0; e < elbow_index; ++e) {
    const int len = p - offset;
    if (len < 2) break;  // no further elbows; keep the last one found
    elbow = offset + detail::zhu_ghodsi_elbow(magnitudes.data() + offset, len);
    offset = elbow;
  }
  return std::min(elbow, max_d);
}

// argmin over orthogonal w of ||x - y w||_F via the polar factor of y^T x.
inline ProcrustesRotation procrustes(const Eigen::MatrixXd& x,
                                     const Eigen::MatrixXd& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw std::invalid_argument("procrustes: shape mismatch");
  const Eigen::MatrixXd m = y.transpose() * x;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  ProcrustesRotation out;
  out.w = svd.matrixU() * svd.matrixV().transpose();
  out.residual = (x - y * out.w).norm();
  return out;
}

inline ProcrustesRotation procrustes(const EmbeddingMatrix& x,
                                     const EmbeddingMatrix& y) {
  return procrustes(x.values, y.values);
}

}  // namespace omnimatch::spectral
