#pragma once

#include <Eigen/Dense>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "omnimatch/errors.hpp"
#include "omnimatch/graph.hpp"
#include "omnimatch/warnings.hpp"

namespace omnimatch::io {

// Shortest decimal that round-trips a double (17 significant digits).
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace detail {

inline std::runtime_error parse_error(const std::string& path, int line,
                                      const std::string& what) {
  return std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

inline double parse_real(const std::string& token, const std::string& path, int line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &pos);
  } catch (const std::exception&) {
    throw parse_error(path, line, "not a number: '" + token + "'");
  }
  if (pos != token.size())
    throw parse_error(path, line, "trailing characters in number: '" + token + "'");
  return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // Trim surrounding spaces; formats here are plain numeric CSV.
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline bool blank(const std::string& line) {
  for (const char c : line)
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  return true;
}

// Blank lines and '#' comment lines (e.g. generated-timestamp headers) are
// skipped by every reader.
inline bool skippable(const std::string& line) {
  for (const char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace detail

// Rectangular numeric CSV (no header) -> dense matrix. Ragged rows are
// errors with file:line context.
inline Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::skippable(line)) continue;
    const auto fields = detail::split_csv_line(line);
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(detail::parse_real(f, path, lineno));
    if (!rows.empty() && row.size() != rows.front().size())
      throw detail::parse_error(path, lineno,
                                "ragged row: expected " + std::to_string(rows.front().size()) +
                                    " fields, found " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");
  Eigen::MatrixXd mat(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < mat.rows(); ++i)
    for (Eigen::Index j = 0; j < mat.cols(); ++j)
      mat(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return mat;
}

inline void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& mat,
                             const std::vector<std::string>& preamble = {}) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  for (const auto& line : preamble) out << "# " << line << '\n';
  for (Eigen::Index i = 0; i < mat.rows(); ++i) {
    for (Eigen::Index j = 0; j < mat.cols(); ++j) {
      if (j) out << ',';
      out << format_real(mat(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

// Dense symmetric adjacency CSV -> Graph. Near-symmetric input (entries
// differing by <= tol) is averaged into exact symmetry; larger asymmetry is
// an error. Nonzero diagonal entries are zeroed with a warning. Graphs whose
// entries are all 0/1 are flagged binary.
inline core::Graph read_graph_csv(const std::string& path, WarningLog* log = nullptr,
                                  double tol = 1e-8) {
  Eigen::MatrixXd mat = read_matrix_csv(path);
  if (mat.rows() != mat.cols())
    throw std::runtime_error(path + ": adjacency matrix must be square, got " +
                             std::to_string(mat.rows()) + "x" + std::to_string(mat.cols()));
  const Eigen::Index n = mat.rows();
  bool warned_diag = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (mat(i, i) != 0.0) {
      if (!warned_diag) {
        warn_to(log, path + ": nonzero diagonal entries zeroed (self-loops dropped)");
        warned_diag = true;
      }
      mat(i, i) = 0.0;
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double diff = std::abs(mat(i, j) - mat(j, i));
      if (diff > tol)
        throw std::runtime_error(path + ": asymmetric entries at (" + std::to_string(i) +
                                 ", " + std::to_string(j) + "): " + format_real(mat(i, j)) +
                                 " vs " + format_real(mat(j, i)));
      if (diff != 0.0) {
        const double avg = 0.5 * (mat(i, j) + mat(j, i));
        mat(i, j) = avg;
        mat(j, i) = avg;
      }
    }
  }
  bool binary = true;
  for (Eigen::Index i = 0; i < n && binary; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (mat(i, j) != 0.0 && mat(i, j) != 1.0) {
        binary = false;
        break;
      }
  core::Graph g(std::move(mat), binary);
  g.validate();
  return g;
}

// Whitespace-separated edge list: "i j" or "i j w" per line, 0-based vertex
// ids, weight defaults to 1.0. Symmetrized on load; self-loops dropped with
// a warning. Vertex count is max id + 1 unless a larger n is given.
inline core::Graph read_edge_list(const std::string& path, int n = 0,
                                  WarningLog* log = nullptr) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  struct Edge {
    int i, j;
    double w;
  };
  std::vector<Edge> edges;
  int max_id = -1;
  std::string line;
  int lineno = 0;
  bool warned_loop = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::skippable(line)) continue;
    std::istringstream ss(line);
    std::string ti, tj, tw, extra;
    ss >> ti >> tj;
    if (tj.empty()) throw detail::parse_error(path, lineno, "expected 'i j [w]'");
    double w = 1.0;
    if (ss >> tw) w = detail::parse_real(tw, path, lineno);
    if (ss >> extra) throw detail::parse_error(path, lineno, "too many fields");
    const double di = detail::parse_real(ti, path, lineno);
    const double dj = detail::parse_real(tj, path, lineno);
    const int i = static_cast<int>(di);
    const int j = static_cast<int>(dj);
    if (di != i || dj != j || i < 0 || j < 0)
      throw detail::parse_error(path, lineno, "vertex ids must be nonnegative integers");
    max_id = std::max(max_id, std::max(i, j));
    if (i == j) {
      // The vertex still counts toward the size; only the edge is dropped.
      if (w != 0.0 && !warned_loop) {
        warn_to(log, path + ": self-loop entries dropped (diagonal zeroed)");
        warned_loop = true;
      }
      continue;
    }
    edges.push_back({i, j, w});
  }
  const int size = std::max(n, max_id + 1);
  if (size <= 0) throw std::runtime_error(path + ": no edges and no vertex count given");
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(size, size);
  bool binary = true;
  for (const auto& e : edges) {
    mat(e.i, e.j) = e.w;
    mat(e.j, e.i) = e.w;
    if (e.w != 0.0 && e.w != 1.0) binary = false;
  }
  core::Graph g(std::move(mat), binary);
  g.validate();
  return g;
}

// One label token per line (leading/trailing whitespace stripped); blank
// lines are skipped.
inline std::vector<std::string> read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (detail::skippable(line)) continue;
    const auto b = line.find_first_not_of(" \t\r");
    const auto e = line.find_last_not_of(" \t\r");
    labels.push_back(line.substr(b, e - b + 1));
  }
  if (labels.empty()) throw std::runtime_error(path + ": no labels");
  return labels;
}

// Cosine-similarity graph over embedding rows: weight (i,j) = cos angle
// between rows i and j, diagonal zeroed. Zero-norm rows are errors (cosine
// undefined). Entries with |w| < threshold are zeroed when threshold > 0.
// An all-zero result is degenerate and throws.
inline core::Graph cosine_similarity_graph(const Eigen::MatrixXd& embeddings,
                                           double threshold = 0.0,
                                           WarningLog* log = nullptr) {
  const Eigen::Index n = embeddings.rows();
  if (n < 2) throw std::invalid_argument("cosine_similarity_graph: need at least 2 rows");
  Eigen::VectorXd norms(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    norms(i) = embeddings.row(i).norm();
    if (norms(i) == 0.0)
      throw DegenerateInputError("cosine_similarity_graph: zero-norm embedding row " +
                                 std::to_string(i));
  }
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double w = embeddings.row(i).dot(embeddings.row(j)) / (norms(i) * norms(j));
      if (threshold > 0.0 && std::abs(w) < threshold) w = 0.0;
      mat(i, j) = w;
      mat(j, i) = w;
    }
  if (mat.cwiseAbs().maxCoeff() == 0.0)
    throw DegenerateInputError(
        "cosine_similarity_graph: all similarities are zero (orthogonal rows)");
  if (log && threshold > 0.0) {
    Eigen::Index kept = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j)
        if (mat(i, j) != 0.0) ++kept;
    if (kept * 10 < n * (n - 1) / 2)
      warn_to(log, "cosine_similarity_graph: threshold removed over 90% of entries");
  }
  return core::Graph(std::move(mat), /*binary=*/false);
}

// Rectangular table with a declared header, written row by row; reals use
// round-trip formatting.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::vector<std::string> header,
            const std::vector<std::string>& preamble = {})
      : path_(path), out_(path), columns_(header.size()) {
    if (!out_) throw std::runtime_error(path + ": cannot open for writing");
    for (const auto& line : preamble) out_ << "# " << line << '\n';
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c) out_ << ',';
      out_ << header[c];
    }
    out_ << '\n';
  }

  void row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_)
      throw std::logic_error(path_ + ": row has " + std::to_string(fields.size()) +
                             " fields, header has " + std::to_string(columns_));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c) out_ << ',';
      out_ << fields[c];
    }
    out_ << '\n';
  }

  void close() {
    out_.close();
    if (!out_) throw std::runtime_error(path_ + ": write failed");
  }

 private:
  std::string path_;
  std::ofstream out_;
  std::size_t columns_;
};

}  // namespace omnimatch::io
