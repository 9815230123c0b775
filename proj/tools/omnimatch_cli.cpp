// omnimatch: experiment harness for seeded multiple-graph matching.
//
// Subcommands: match, multimatch, power, cluster, ingest-embeddings.
// Each command reads its parameters from a JSON config document (--config),
// writes plot-ready CSV tables plus a summary.json into --out-dir, and echoes
// the fully resolved configuration so any run can be reproduced from its own
// output. Unknown config keys are errors.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "omnimatch/omnimatch.hpp"

namespace om = omnimatch;
using json = nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Config document: typed getters record every known key and its resolved
// value; finish() rejects anything the command did not ask for.

class Config {
 public:
  Config(json doc, std::string command)
      : doc_(std::move(doc)), command_(std::move(command)) {
    if (!doc_.is_object())
      throw std::runtime_error(command_ + " config: document must be a JSON object");
  }

  bool has(const std::string& key) const { return doc_.contains(key); }

  int get_int(const std::string& key, int def, int lo, int hi) {
    known_.insert(key);
    int v = def;
    if (doc_.contains(key)) {
      if (!doc_[key].is_number_integer() && !doc_[key].is_number_unsigned())
        throw bad_key(key, "must be an integer");
      v = doc_[key].get<int>();
    }
    if (v < lo || v > hi)
      throw bad_key(key, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    resolved_[key] = v;
    return v;
  }

  double get_real(const std::string& key, double def, double lo, double hi) {
    known_.insert(key);
    double v = def;
    if (doc_.contains(key)) {
      if (!doc_[key].is_number()) throw bad_key(key, "must be a number");
      v = doc_[key].get<double>();
    }
    if (!(v >= lo && v <= hi))
      throw bad_key(key, "must be in [" + om::io::format_real(lo) + ", " +
                             om::io::format_real(hi) + "]");
    resolved_[key] = v;
    return v;
  }

  bool get_bool(const std::string& key, bool def) {
    known_.insert(key);
    bool v = def;
    if (doc_.contains(key)) {
      if (!doc_[key].is_boolean()) throw bad_key(key, "must be a boolean");
      v = doc_[key].get<bool>();
    }
    resolved_[key] = v;
    return v;
  }

  std::uint64_t get_seed(const std::string& key, std::uint64_t def) {
    known_.insert(key);
    std::uint64_t v = def;
    if (doc_.contains(key)) {
      if (!doc_[key].is_number_unsigned() && !doc_[key].is_number_integer())
        throw bad_key(key, "must be a nonnegative integer");
      if (doc_[key].is_number_integer() && doc_[key].get<std::int64_t>() < 0)
        throw bad_key(key, "must be a nonnegative integer");
      v = doc_[key].get<std::uint64_t>();
    }
    resolved_[key] = v;
    return v;
  }

  // Scalar values are promoted to one-element lists.
  std::vector<int> get_int_list(const std::string& key, std::vector<int> def, int lo, int hi) {
    known_.insert(key);
    std::vector<int> v = std::move(def);
    if (doc_.contains(key)) {
      v.clear();
      const json& j = doc_[key];
      if (j.is_number_integer() || j.is_number_unsigned()) {
        v.push_back(j.get<int>());
      } else if (j.is_array()) {
        for (const auto& e : j) {
          if (!e.is_number_integer() && !e.is_number_unsigned())
            throw bad_key(key, "must be an integer or list of integers");
          v.push_back(e.get<int>());
        }
      } else {
        throw bad_key(key, "must be an integer or list of integers");
      }
    }
    if (v.empty()) throw bad_key(key, "must not be empty");
    for (const int e : v)
      if (e < lo || e > hi)
        throw bad_key(key, "entries must be in [" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "]");
    resolved_[key] = v;
    return v;
  }

  std::vector<double> get_real_list(const std::string& key, std::vector<double> def,
                                    double lo, double hi) {
    known_.insert(key);
    std::vector<double> v = std::move(def);
    if (doc_.contains(key)) {
      v.clear();
      const json& j = doc_[key];
      if (j.is_number()) {
        v.push_back(j.get<double>());
      } else if (j.is_array()) {
        for (const auto& e : j) {
          if (!e.is_number()) throw bad_key(key, "must be a number or list of numbers");
          v.push_back(e.get<double>());
        }
      } else {
        throw bad_key(key, "must be a number or list of numbers");
      }
    }
    if (v.empty()) throw bad_key(key, "must not be empty");
    for (const double e : v)
      if (!(e >= lo && e <= hi))
        throw bad_key(key, "entries must be in [" + om::io::format_real(lo) + ", " +
                               om::io::format_real(hi) + "]");
    resolved_[key] = v;
    return v;
  }

  std::vector<std::string> get_string_list(const std::string& key,
                                           std::vector<std::string> def,
                                           const std::vector<std::string>& allowed = {}) {
    known_.insert(key);
    std::vector<std::string> v = std::move(def);
    if (doc_.contains(key)) {
      v.clear();
      const json& j = doc_[key];
      if (j.is_string()) {
        v.push_back(j.get<std::string>());
      } else if (j.is_array()) {
        for (const auto& e : j) {
          if (!e.is_string()) throw bad_key(key, "must be a string or list of strings");
          v.push_back(e.get<std::string>());
        }
      } else {
        throw bad_key(key, "must be a string or list of strings");
      }
    }
    if (v.empty()) throw bad_key(key, "must not be empty");
    if (!allowed.empty()) {
      for (const auto& e : v) {
        if (std::find(allowed.begin(), allowed.end(), e) == allowed.end()) {
          std::string opts;
          for (const auto& a : allowed) opts += (opts.empty() ? "" : ", ") + a;
          throw bad_key(key, "entry '" + e + "' is not one of: " + opts);
        }
        if (std::count(v.begin(), v.end(), e) > 1)
          throw bad_key(key, "duplicate entry '" + e + "'");
      }
    }
    resolved_[key] = v;
    return v;
  }

  std::string get_string(const std::string& key, std::string def,
                         const std::vector<std::string>& allowed = {}) {
    known_.insert(key);
    std::string v = std::move(def);
    if (doc_.contains(key)) {
      if (!doc_[key].is_string()) throw bad_key(key, "must be a string");
      v = doc_[key].get<std::string>();
    }
    if (!allowed.empty() &&
        std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
      std::string opts;
      for (const auto& a : allowed) opts += (opts.empty() ? "" : ", ") + a;
      throw bad_key(key, "must be one of: " + opts);
    }
    resolved_[key] = v;
    return v;
  }

  void finish() const {
    for (const auto& item : doc_.items())
      if (known_.find(item.key()) == known_.end())
        throw std::runtime_error(command_ + " config: unknown key '" + item.key() + "'");
  }

  std::runtime_error required(const std::string& key, const std::string& why) const {
    return std::runtime_error(command_ + " config: key '" + key + "' is required " + why);
  }

  const json& resolved() const { return resolved_; }

 private:
  std::runtime_error bad_key(const std::string& key, const std::string& what) const {
    return std::runtime_error(command_ + " config: key '" + key + "' " + what);
  }

  json doc_;
  std::string command_;
  json resolved_ = json::object();
  std::set<std::string> known_;
};

// ---------------------------------------------------------------------------
// Run context: output registration, warning collection, timestamp policy.

struct RunContext {
  std::string out_dir = ".";
  bool no_timestamp = false;
  int threads = 1;
  om::WarningLog log;
  std::vector<std::string> outputs;

  std::string path(const std::string& name) {
    outputs.push_back(name);
    return (std::filesystem::path(out_dir) / name).string();
  }

  // Comment lines written ahead of any CSV payload.
  std::vector<std::string> preamble(const std::string& describes) const {
    std::vector<std::string> lines;
    if (!no_timestamp) lines.push_back("generated " + om::io::timestamp_utc());
    if (!describes.empty()) lines.push_back(describes);
    return lines;
  }
};

void write_summary(RunContext& ctx, const std::string& command, const json& config,
                   json results) {
  {
    std::ofstream echo(std::filesystem::path(ctx.out_dir) / "config_echo.json");
    if (!echo) throw std::runtime_error("cannot write config_echo.json");
    echo << config.dump(2) << '\n';
    ctx.outputs.push_back("config_echo.json");
  }
  json s;
  s["command"] = command;
  s["config"] = config;
  s["outputs"] = ctx.outputs;
  s["warnings"] = ctx.log.messages();
  s["results"] = std::move(results);
  if (!ctx.no_timestamp) s["timestamp"] = om::io::timestamp_utc();
  std::ofstream out(std::filesystem::path(ctx.out_dir) / "summary.json");
  if (!out) throw std::runtime_error("cannot write summary.json");
  out << s.dump(2) << '\n';
  for (const auto& msg : ctx.log.messages()) std::cerr << "warning: " << msg << '\n';
}

// ---------------------------------------------------------------------------
// Shared input plumbing.

om::core::Graph load_graph(const std::string& path, const std::string& format, int n_hint,
                           om::WarningLog* log) {
  std::string fmt = format;
  if (fmt == "auto") {
    const auto ext = std::filesystem::path(path).extension().string();
    fmt = (ext == ".csv") ? "csv" : "edgelist";
  }
  return fmt == "csv" ? om::io::read_graph_csv(path, log)
                      : om::io::read_edge_list(path, n_hint, log);
}

std::vector<om::core::Graph> load_graphs(const std::vector<std::string>& paths,
                                         const std::string& format, int n_hint,
                                         bool log1p_weights, om::WarningLog* log) {
  std::vector<om::core::Graph> graphs;
  graphs.reserve(paths.size());
  for (const auto& p : paths) {
    om::core::Graph g = load_graph(p, format, n_hint, log);
    if (log1p_weights) {
      if (g.weights.minCoeff() < 0.0)
        throw std::runtime_error(p + ": log1p transform requires nonnegative weights");
      g.weights = g.weights.array().log1p().matrix();
      g.is_binary = false;
    }
    if (!graphs.empty() && g.n != graphs.front().n)
      throw std::runtime_error(p + ": graph has " + std::to_string(g.n) +
                               " vertices but " + paths.front() + " has " +
                               std::to_string(graphs.front().n));
    graphs.push_back(std::move(g));
  }
  return graphs;
}

// Canonical layout: the given seed vertices (ascending) first, every other
// vertex (ascending) after. Returns the original id at each new position.
std::vector<int> canonical_order(const std::vector<int>& seed_ids, int n) {
  std::vector<char> is_seed(static_cast<std::size_t>(n), 0);
  for (const int v : seed_ids) {
    if (v < 0 || v >= n)
      throw std::runtime_error("seed id " + std::to_string(v) + " out of range for n=" +
                               std::to_string(n));
    if (is_seed[static_cast<std::size_t>(v)])
      throw std::runtime_error("duplicate seed id " + std::to_string(v));
    is_seed[static_cast<std::size_t>(v)] = 1;
  }
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v)
    if (is_seed[static_cast<std::size_t>(v)]) order.push_back(v);
  for (int v = 0; v < n; ++v)
    if (!is_seed[static_cast<std::size_t>(v)]) order.push_back(v);
  return order;
}

om::core::Graph reorder_graph(const om::core::Graph& g, const std::vector<int>& order) {
  Eigen::MatrixXd w(g.n, g.n);
  for (int a = 0; a < g.n; ++a)
    for (int b = 0; b < g.n; ++b)
      w(a, b) = g.weights(order[static_cast<std::size_t>(a)],
                          order[static_cast<std::size_t>(b)]);
  return om::core::Graph(std::move(w), g.is_binary);
}

// All-identity matchings: the uncorrected baseline where every graph is
// compared under the layout it arrived in.
om::assign::MatchMatrix identity_matchings(int m, int u) {
  om::assign::MatchMatrix grid;
  grid.m = m;
  grid.mode = om::assign::MatchMode::pairwise;
  grid.anchor = -1;
  grid.results.assign(static_cast<std::size_t>(m),
                      std::vector<om::assign::MatchResult>(static_cast<std::size_t>(m)));
  for (auto& row : grid.results)
    for (auto& r : row) {
      r.method = om::assign::MatchMethod::hard;
      r.permutation = om::core::identity_permutation(u);
      r.total_cost = 0.0;
    }
  return grid;
}

// 1-based ranks by descending value; ties go to the smaller index.
std::vector<int> descending_ranks(const Eigen::VectorXd& values) {
  const auto m = static_cast<int>(values.size());
  std::vector<int> idx(static_cast<std::size_t>(m));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return values(a) > values(b); });
  std::vector<int> rank(static_cast<std::size_t>(m), 0);
  for (int pos = 0; pos < m; ++pos) rank[static_cast<std::size_t>(idx[static_cast<std::size_t>(pos)])] = pos + 1;
  return rank;
}

std::string fmt(double v) { return om::io::format_real(v); }
std::string fmt(int v) { return std::to_string(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }

// Mean embedding-dimension selection for real data: elbow of the mean
// adjacency spectrum (magnitudes), capped at max_d.
int auto_embed_dim(const std::vector<om::core::Graph>& graphs, int max_d,
                   RunContext& ctx, Eigen::VectorXd* scree_out) {
  const int n = graphs.front().n;
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(n, n);
  for (const auto& g : graphs) mean += g.weights;
  mean /= static_cast<double>(graphs.size());
  const om::spectral::Spectrum spec = om::spectral::eig_symmetric(mean);
  Eigen::VectorXd mags = spec.eigenvalues.cwiseAbs();
  const int d = om::spectral::select_dimension(mags, std::min(max_d, n), 1, &ctx.log);
  if (scree_out) *scree_out = mags;
  return d;
}

// ---------------------------------------------------------------------------
// match: matching accuracy on the two-graph model, or matchings on files.

// Seed/OOS embedding for a graph collection; the unit every match-style
// command is built from.
std::vector<om::spectral::EmbeddingMatrix> embed_unseeded(
    const std::vector<om::core::Graph>& graphs, const om::core::SeedSplit& split, int d,
    om::WarningLog* log) {
  std::vector<om::core::Graph> seeds;
  seeds.reserve(graphs.size());
  for (const auto& g : graphs) seeds.push_back(om::core::induced_seed_subgraph(g, split));
  const auto seed_embs = om::omni::omni_embed(seeds, d, log);
  return om::oos::oos_embed_all(graphs, split, seed_embs, log);
}

void cmd_match_model(Config& cfg, RunContext& ctx) {
  const int n = cfg.get_int("n", 500, 4, 1000000);
  const auto d_grid = cfg.get_int_list("d", {2}, 1, 1000);
  const auto u_grid = cfg.get_int_list("u", {10}, 0, n - 1);
  const auto k_grid = cfg.get_int_list("k", {1, 5}, 1, n);
  const auto methods = cfg.get_string_list("methods", {"hard", "soft"}, {"hard", "soft"});
  const int n_mc = cfg.get_int("n_mc", 50, 1, 1000000);
  const int offset = cfg.get_int("dirichlet_offset", 1, 1, 1000);
  const std::uint64_t seed = cfg.get_seed("seed", 0);
  cfg.finish();

  const bool want_hard = std::find(methods.begin(), methods.end(), "hard") != methods.end();
  const bool want_soft = std::find(methods.begin(), methods.end(), "soft") != methods.end();
  const om::Rng base(seed);

  om::io::CsvWriter table(ctx.path("match_accuracy.csv"),
                          {"n", "u", "d", "method", "k", "accuracy", "n_mc", "seed"},
                          ctx.preamble("mean matching accuracy per grid cell"));
  for (const int d : d_grid) {
    if (n - *std::max_element(u_grid.begin(), u_grid.end()) < d)
      throw std::runtime_error("match: n - u leaves fewer than d seeds");
    for (const int u : u_grid) {
      const om::core::SeedSplit split = om::core::SeedSplit::canonical(n - u, u);
      std::vector<double> hard_acc(static_cast<std::size_t>(n_mc), 1.0);
      std::vector<std::vector<double>> soft_acc(
          k_grid.size(), std::vector<double>(static_cast<std::size_t>(n_mc), 1.0));
      if (u > 0) {
        om::parallel_for(static_cast<std::size_t>(n_mc), ctx.threads, [&](std::size_t r) {
          om::Rng rng = base.child(static_cast<std::uint64_t>(d))
                            .child(static_cast<std::uint64_t>(u))
                            .child(r);
          const auto x = om::models::sample_dirichlet_latents(n, d, d + offset, rng);
          const om::core::Graph a = om::models::sample_rdpg(x, rng);
          const om::core::Graph b0 = om::models::sample_rdpg(x, rng);
          const om::core::PermutationMap q = om::models::random_shuffle(u, rng);
          const om::core::Graph b = om::core::apply_shuffle(b0, split, q);
          om::WarningLog sink;
          const auto oos = embed_unseeded({a, b}, split, d, &sink);
          om::assign::CostMatrix c = om::assign::cost_matrix(oos[0], oos[1]);
          if (want_hard)
            hard_acc[r] = om::metrics::matching_accuracy(
                om::assign::solve_lap(c).permutation, q);
          if (want_soft)
            for (std::size_t ki = 0; ki < k_grid.size(); ++ki)
              soft_acc[ki][r] = om::metrics::soft_accuracy(
                  om::assign::soft_match(c, k_grid[ki]), q);
        });
      }
      auto mean = [n_mc](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0) / n_mc;
      };
      if (want_hard)
        table.row({fmt(n), fmt(u), fmt(d), "hard", "0", fmt(mean(hard_acc)), fmt(n_mc),
                   fmt(seed)});
      if (want_soft)
        for (std::size_t ki = 0; ki < k_grid.size(); ++ki)
          table.row({fmt(n), fmt(u), fmt(d), "soft", fmt(k_grid[ki]),
                     fmt(mean(soft_acc[ki])), fmt(n_mc), fmt(seed)});
    }
  }
  table.close();
  write_summary(ctx, "match", cfg.resolved(), json::object());
}

// Real graphs with known row correspondence: inject u shuffles per replicate
// and measure recovery accuracy, as in the cross-language cosine-graph study.
void cmd_match_files_shuffled(Config& cfg, RunContext& ctx,
                              const std::vector<std::string>& inputs,
                              const std::string& format, int n_hint) {
  const auto u_grid = cfg.get_int_list("shuffle_u", {}, 1, 1000000);
  const auto d_grid = cfg.get_int_list("d", {10}, 1, 1000000);
  const auto k_grid = cfg.get_int_list("k", {1, 5}, 1, 1000000);
  const auto methods = cfg.get_string_list("methods", {"hard", "soft"}, {"hard", "soft"});
  const int n_mc = cfg.get_int("n_mc", 10, 1, 1000000);
  const std::uint64_t seed = cfg.get_seed("seed", 0);
  cfg.finish();

  const auto graphs = load_graphs(inputs, format, n_hint, false, &ctx.log);
  const int n = graphs.front().n;
  const auto m = static_cast<int>(graphs.size());
  const bool want_hard = std::find(methods.begin(), methods.end(), "hard") != methods.end();
  const bool want_soft = std::find(methods.begin(), methods.end(), "soft") != methods.end();
  for (const int u : u_grid)
    if (u >= n) throw std::runtime_error("match: shuffle_u must be below n");
  for (const int d : d_grid)
    if (n - *std::max_element(u_grid.begin(), u_grid.end()) < d)
      throw std::runtime_error("match: n - shuffle_u leaves fewer than d seeds");

  const om::Rng base(seed);
  om::io::CsvWriter table(ctx.path("match_accuracy.csv"),
                          {"n", "u", "d", "method", "k", "accuracy", "n_mc", "seed"},
                          ctx.preamble("mean recovery accuracy on shuffled input graphs"));
  const auto n_pairs = static_cast<double>(m) * (m - 1) / 2.0;
  for (const int u : u_grid) {
    const om::core::SeedSplit split = om::core::SeedSplit::canonical(n - u, u);
    // One shuffle draw per replicate, shared across the d grid so dimension
    // comparisons are paired.
    std::vector<std::vector<om::core::Graph>> rep_graphs(static_cast<std::size_t>(n_mc));
    std::vector<std::vector<om::core::PermutationMap>> rep_truth(
        static_cast<std::size_t>(n_mc));
    for (int r = 0; r < n_mc; ++r) {
      om::Rng rng = base.child(static_cast<std::uint64_t>(u)).child(
          static_cast<std::uint64_t>(r));
      std::vector<int> chosen = om::shuffled_indices(n, rng);
      chosen.resize(static_cast<std::size_t>(u));
      std::sort(chosen.begin(), chosen.end());
      std::vector<int> non_seed_order = canonical_order(chosen, n);
      // canonical_order puts the chosen set first; we want them last.
      std::vector<int> order(non_seed_order.begin() + u, non_seed_order.end());
      order.insert(order.end(), non_seed_order.begin(), non_seed_order.begin() + u);
      auto& gs = rep_graphs[static_cast<std::size_t>(r)];
      auto& qs = rep_truth[static_cast<std::size_t>(r)];
      for (int g = 0; g < m; ++g) {
        om::core::Graph laid_out = reorder_graph(graphs[static_cast<std::size_t>(g)], order);
        om::core::PermutationMap q = g == 0 ? om::core::identity_permutation(u)
                                            : om::models::random_shuffle(u, rng);
        gs.push_back(om::core::apply_shuffle(laid_out, split, q));
        qs.push_back(std::move(q));
      }
    }
    for (const int d : d_grid) {
      std::vector<double> hard_acc(static_cast<std::size_t>(n_mc), 0.0);
      std::vector<std::vector<double>> soft_acc(
          k_grid.size(), std::vector<double>(static_cast<std::size_t>(n_mc), 0.0));
      om::parallel_for(static_cast<std::size_t>(n_mc), ctx.threads, [&](std::size_t r) {
        om::WarningLog sink;
        const auto oos = embed_unseeded(rep_graphs[r], split, d, &sink);
        const auto& qs = rep_truth[r];
        for (int i = 0; i < m; ++i)
          for (int j = i + 1; j < m; ++j) {
            om::assign::CostMatrix c = om::assign::cost_matrix(
                oos[static_cast<std::size_t>(i)], oos[static_cast<std::size_t>(j)]);
            const om::core::PermutationMap truth = om::core::compose(
                qs[static_cast<std::size_t>(i)].inverse(), qs[static_cast<std::size_t>(j)]);
            if (want_hard)
              hard_acc[r] += om::metrics::matching_accuracy(
                                 om::assign::solve_lap(c).permutation, truth) /
                             n_pairs;
            if (want_soft)
              for (std::size_t ki = 0; ki < k_grid.size(); ++ki)
                soft_acc[ki][r] += om::metrics::soft_accuracy(
                                       om::assign::soft_match(c, k_grid[ki]), truth) /
                                   n_pairs;
          }
      });
      auto mean = [n_mc](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0) / n_mc;
      };
      if (want_hard)
        table.row({fmt(n), fmt(u), fmt(d), "hard", "0", fmt(mean(hard_acc)), fmt(n_mc),
                   fmt(seed)});
      if (want_soft)
        for (std::size_t ki = 0; ki < k_grid.size(); ++ki)
          table.row({fmt(n), fmt(u), fmt(d), "soft", fmt(k_grid[ki]),
                     fmt(mean(soft_acc[ki])), fmt(n_mc), fmt(seed)});
    }
  }
  table.close();
  write_summary(ctx, "match", cfg.resolved(), json::object());
}

// Real graphs without ground truth: write the recovered matchings.
void cmd_match_files_plain(Config& cfg, RunContext& ctx,
                           const std::vector<std::string>& inputs,
                           const std::string& format, int n_hint) {
  if (!cfg.has("seed_ids"))
    throw cfg.required("seed_ids", "for real-data matching (the vertices whose "
                                   "cross-graph correspondence is known)");
  const auto seed_ids = cfg.get_int_list("seed_ids", {}, 0, 1000000000);
  int d = cfg.get_int("d", 0, 0, 1000000);
  const int max_auto_d = cfg.get_int("max_auto_d", 50, 1, 1000000);
  const auto k_grid = cfg.get_int_list("k", {5}, 1, 1000000);
  const auto methods = cfg.get_string_list("methods", {"hard", "soft"}, {"hard", "soft"});
  cfg.get_seed("seed", 0);  // echoed for uniformity; this path draws nothing
  cfg.finish();

  const auto graphs_raw = load_graphs(inputs, format, n_hint, false, &ctx.log);
  const int n = graphs_raw.front().n;
  const auto m = static_cast<int>(graphs_raw.size());
  const auto s = static_cast<int>(seed_ids.size());
  if (s < 1 || s >= n)
    throw std::runtime_error("match: seed_ids must name between 1 and n-1 vertices");
  const std::vector<int> order = canonical_order(seed_ids, n);
  std::vector<om::core::Graph> graphs;
  graphs.reserve(graphs_raw.size());
  for (const auto& g : graphs_raw) graphs.push_back(reorder_graph(g, order));
  const om::core::SeedSplit split = om::core::SeedSplit::canonical(s, n - s);

  json results = json::object();
  if (d == 0) {
    Eigen::VectorXd scree;
    d = auto_embed_dim(graphs, std::min(max_auto_d, s), ctx, &scree);
    om::io::CsvWriter sw(ctx.path("scree.csv"), {"index", "magnitude"},
                         ctx.preamble("mean-adjacency spectrum magnitudes"));
    for (Eigen::Index i = 0; i < scree.size(); ++i)
      sw.row({fmt(static_cast<int>(i)), fmt(scree(i))});
    sw.close();
    results["chosen_d"] = d;
  }
  if (s < d) throw std::runtime_error("match: need at least d seeds");

  const bool want_hard = std::find(methods.begin(), methods.end(), "hard") != methods.end();
  const bool want_soft = std::find(methods.begin(), methods.end(), "soft") != methods.end();
  const auto oos = embed_unseeded(graphs, split, d, &ctx.log);
  om::io::CsvWriter table(
      ctx.path("matchings.csv"),
      {"graph_i", "graph_j", "vertex", "candidate", "rank", "distance", "method", "k"},
      ctx.preamble("recovered matchings in original vertex ids"));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      om::assign::CostMatrix c = om::assign::cost_matrix(oos[static_cast<std::size_t>(i)],
                                                         oos[static_cast<std::size_t>(j)]);
      if (want_hard) {
        const om::assign::MatchResult res = om::assign::solve_lap(c);
        for (int v = 0; v < split.u; ++v)
          table.row({fmt(i), fmt(j), fmt(order[static_cast<std::size_t>(s + v)]),
                     fmt(order[static_cast<std::size_t>(s + res.permutation(v))]), "1",
                     fmt(c.values(v, res.permutation(v))), "hard", "0"});
      }
      if (want_soft)
        for (const int k : k_grid) {
          const om::assign::SoftMatch sm = om::assign::soft_match(c, k);
          for (int v = 0; v < split.u; ++v) {
            const auto& cands = sm.candidates[static_cast<std::size_t>(v)];
            for (std::size_t rank = 0; rank < cands.size(); ++rank)
              table.row({fmt(i), fmt(j), fmt(order[static_cast<std::size_t>(s + v)]),
                         fmt(order[static_cast<std::size_t>(s + cands[rank].target)]),
                         fmt(static_cast<int>(rank + 1)), fmt(cands[rank].distance),
                         "soft", fmt(k)});
          }
        }
    }
  table.close();
  json vertex_order = json::array();
  for (const int v : order) vertex_order.push_back(v);
  results["vertex_order"] = std::move(vertex_order);
  results["embed_d"] = d;
  write_summary(ctx, "match", cfg.resolved(), std::move(results));
}

void cmd_match(Config& cfg, RunContext& ctx) {
  if (!cfg.has("inputs")) {
    cmd_match_model(cfg, ctx);
    return;
  }
  const auto inputs = cfg.get_string_list("inputs", {});
  if (inputs.size() < 2) throw std::runtime_error("match: need at least 2 input graphs");
  const std::string format =
      cfg.get_string("format", "auto", {"auto", "csv", "edgelist"});
  const int n_hint = cfg.get_int("n", 0, 0, 1000000000);
  if (cfg.has("shuffle_u"))
    cmd_match_files_shuffled(cfg, ctx, inputs, format, n_hint);
  else
    cmd_match_files_plain(cfg, ctx, inputs, format, n_hint);
}

// ---------------------------------------------------------------------------
// multimatch: pairwise distances across a graph collection + anomaly ranking.

void write_anomaly_table(RunContext& ctx, const std::string& name,
                         const Eigen::MatrixXd& mean_dist, int perturbed) {
  const auto m = static_cast<int>(mean_dist.rows());
  const Eigen::VectorXd row_means = mean_dist.rowwise().sum() / (m - 1);
  const std::vector<int> ranks = descending_ranks(row_means);
  std::vector<std::string> header{"graph", "mean_row_distance", "rank"};
  if (perturbed >= 0) header.push_back("is_perturbed");
  om::io::CsvWriter table(ctx.path(name), header,
                          ctx.preamble("per-graph anomaly ranking by mean distance"));
  for (int g = 0; g < m; ++g) {
    std::vector<std::string> row{fmt(g), fmt(row_means(g)),
                                 fmt(ranks[static_cast<std::size_t>(g)])};
    if (perturbed >= 0) row.push_back(g == perturbed ? "1" : "0");
    table.row(row);
  }
  table.close();
}

void cmd_multimatch_model(Config& cfg, RunContext& ctx) {
  const int n = cfg.get_int("n", 500, 4, 1000000);
  const int d = cfg.get_int("d", 10, 1, 1000);
  const int m = cfg.get_int("m", 10, 2, 10000);
  const int u = cfg.get_int("u", 120, 1, n - 1);
  const double err = cfg.get_real("err", 0.05, 0.0, 1.0);
  const int err_vertices = cfg.get_int("err_vertices", 80, 0, n);
  const int offset = cfg.get_int("dirichlet_offset", 2, 1, 1000);
  const auto modes =
      cfg.get_string_list("modes", {"anchor", "pairwise"}, {"anchor", "pairwise"});
  int anchor = cfg.get_int("anchor", -1, -1, m - 1);
  const int n_mc = cfg.get_int("n_mc", 1, 1, 1000000);
  const std::uint64_t seed = cfg.get_seed("seed", 0);
  cfg.finish();
  if (n - u < d) throw std::runtime_error("multimatch: n - u leaves fewer than d seeds");
  if (anchor < 0) anchor = m - 1;

  const om::core::SeedSplit split = om::core::SeedSplit::canonical(n - u, u);
  const om::Rng base(seed);
  // The anomalous graph is fixed across replicates so mean heatmaps stay
  // interpretable; everything else redraws per replicate.
  const int target = [&] {
    om::Rng pick = base.child(1);
    return static_cast<int>(pick.uniform_below(static_cast<std::uint64_t>(m)));
  }();

  struct Accum {
    Eigen::MatrixXd dist_sum;
    int top1 = 0;
  };
  std::vector<Accum> acc(modes.size());
  for (auto& a : acc) a.dist_sum = Eigen::MatrixXd::Zero(m, m);
  std::vector<std::vector<Eigen::MatrixXd>> rep_dist(
      modes.size(), std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(n_mc)));

  om::parallel_for(static_cast<std::size_t>(n_mc), ctx.threads, [&](std::size_t r) {
    om::Rng rng = base.child(2).child(r);
    const auto x = om::models::sample_dirichlet_latents(n, d, d + offset, rng);
    const Eigen::MatrixXd p = om::models::probability_matrix(x);
    std::vector<int> verts = om::shuffled_indices(n, rng);
    verts.resize(static_cast<std::size_t>(err_vertices));
    const Eigen::MatrixXd p_bad = om::models::perturb_probabilities(p, verts, err);
    std::vector<om::core::Graph> graphs;
    graphs.reserve(static_cast<std::size_t>(m));
    for (int g = 0; g < m; ++g)
      graphs.push_back(om::models::sample_bernoulli_graph(g == target ? p_bad : p, rng));
    for (auto& g : graphs) {
      const om::core::PermutationMap q = om::models::random_shuffle(u, rng);
      g = om::core::apply_shuffle(g, split, q);
    }
    om::WarningLog sink;
    for (std::size_t mi = 0; mi < modes.size(); ++mi) {
      const auto mode = modes[mi] == "anchor" ? om::assign::MatchMode::anchor
                                              : om::assign::MatchMode::pairwise;
      const om::assign::MatchMatrix grid =
          om::assign::omnimatch(graphs, split, d, mode, anchor, &sink);
      rep_dist[mi][r] = om::metrics::pairwise_distances(graphs, grid).values;
    }
  });
  for (std::size_t mi = 0; mi < modes.size(); ++mi)
    for (int r = 0; r < n_mc; ++r) {
      const Eigen::MatrixXd& d_r = rep_dist[mi][static_cast<std::size_t>(r)];
      acc[mi].dist_sum += d_r;
      const Eigen::VectorXd row_means = d_r.rowwise().sum() / (m - 1);
      if (descending_ranks(row_means)[static_cast<std::size_t>(target)] == 1)
        ++acc[mi].top1;
    }

  json results = json::object();
  results["anchor"] = anchor;
  results["perturbed_graph"] = target;
  for (std::size_t mi = 0; mi < modes.size(); ++mi) {
    const Eigen::MatrixXd mean_dist = acc[mi].dist_sum / n_mc;
    om::io::write_matrix_csv(
        ctx.path("distances_" + modes[mi] + ".csv"), mean_dist,
        ctx.preamble("mean pairwise aligned-graph distances; row/col = graph index"));
    write_anomaly_table(ctx, "anomaly_" + modes[mi] + ".csv", mean_dist, target);
    results["top1_rate_" + modes[mi]] = static_cast<double>(acc[mi].top1) / n_mc;
  }
  write_summary(ctx, "multimatch", cfg.resolved(), std::move(results));
}

void cmd_multimatch_files(Config& cfg, RunContext& ctx) {
  const auto inputs = cfg.get_string_list("inputs", {});
  if (inputs.size() < 2)
    throw std::runtime_error("multimatch: need at least 2 input graphs");
  const std::string format =
      cfg.get_string("format", "auto", {"auto", "csv", "edgelist"});
  const int n_hint = cfg.get_int("n", 0, 0, 1000000000);
  if (!cfg.has("seed_ids"))
    throw cfg.required("seed_ids", "for real-data matching (the vertices whose "
                                   "cross-graph correspondence is known)");
  const auto seed_ids = cfg.get_int_list("seed_ids", {}, 0, 1000000000);
  int d = cfg.get_int("d", 0, 0, 1000000);
  const int max_auto_d = cfg.get_int("max_auto_d", 50, 1, 1000000);
  const auto modes =
      cfg.get_string_list("modes", {"anchor", "pairwise"}, {"anchor", "pairwise"});
  const auto m_int = static_cast<int>(inputs.size());
  int anchor = cfg.get_int("anchor", -1, -1, m_int - 1);
  cfg.finish();
  if (anchor < 0) anchor = m_int - 1;

  const auto graphs_raw = load_graphs(inputs, format, n_hint, false, &ctx.log);
  const int n = graphs_raw.front().n;
  const auto s = static_cast<int>(seed_ids.size());
  if (s < 1 || s >= n)
    throw std::runtime_error("multimatch: seed_ids must name between 1 and n-1 vertices");
  const std::vector<int> order = canonical_order(seed_ids, n);
  std::vector<om::core::Graph> graphs;
  for (const auto& g : graphs_raw) graphs.push_back(reorder_graph(g, order));
  const om::core::SeedSplit split = om::core::SeedSplit::canonical(s, n - s);

  json results = json::object();
  if (d == 0) {
    Eigen::VectorXd scree;
    d = auto_embed_dim(graphs, std::min(max_auto_d, s), ctx, &scree);
    om::io::CsvWriter sw(ctx.path("scree.csv"), {"index", "magnitude"},
                         ctx.preamble("mean-adjacency spectrum magnitudes"));
    for (Eigen::Index i = 0; i < scree.size(); ++i)
      sw.row({fmt(static_cast<int>(i)), fmt(scree(i))});
    sw.close();
    results["chosen_d"] = d;
  }
  results["anchor"] = anchor;
  results["embed_d"] = d;

  for (const auto& mode_name : modes) {
    const auto mode = mode_name == "anchor" ? om::assign::MatchMode::anchor
                                            : om::assign::MatchMode::pairwise;
    const om::assign::MatchMatrix grid =
        om::assign::omnimatch(graphs, split, d, mode, anchor, &ctx.log);
    const Eigen::MatrixXd dist = om::metrics::pairwise_distances(graphs, grid).values;
    om::io::write_matrix_csv(
        ctx.path("distances_" + mode_name + ".csv"), dist,
        ctx.preamble("pairwise aligned-graph distances; row/col = input file index"));
    write_anomaly_table(ctx, "anomaly_" + mode_name + ".csv", dist, -1);
  }
  write_summary(ctx, "multimatch", cfg.resolved(), std::move(results));
}

void cmd_multimatch(Config& cfg, RunContext& ctx) {
  if (cfg.has("inputs"))
    cmd_multimatch_files(cfg, ctx);
  else
    cmd_multimatch_model(cfg, ctx);
}

// ---------------------------------------------------------------------------
// power: Monte-Carlo level/power of the shuffled two-sample test.

void cmd_power(Config& cfg, RunContext& ctx) {
  const int n = cfg.get_int("n", 500, 4, 1000000);
  const int d = cfg.get_int("d", 2, 1, 1000);
  const int v0 = cfg.get_int("v0", 120, 0, n);
  const auto v1_grid = cfg.get_int_list("v1", {v0}, 0, n);
  const auto err_grid = cfg.get_real_list("err", {0.0}, 0.0, 10.0);
  const double alpha = cfg.get_real("alpha", 0.05, 1e-9, 1.0 - 1e-9);
  const int n_mc = cfg.get_int("n_mc", 50, 20, 1000000);
  const auto methods = cfg.get_string_list("methods", {"hard", "soft"}, {"hard", "soft"});
  const int k = cfg.get_int("k", 5, 1, 1000000);
  const int offset = cfg.get_int("dirichlet_offset", 2, 1, 1000);
  const bool uniform_noise = cfg.get_bool("uniform_noise", false);
  const std::uint64_t seed = cfg.get_seed("seed", 0);
  cfg.finish();

  om::io::CsvWriter table(ctx.path("power.csv"),
                          {"err", "v1", "method", "power", "n_mc", "seed"},
                          ctx.preamble("rejection fraction per (err, v1, method) cell"));
  json critical_values = json::array();
  for (const auto& method : methods) {
    const std::string label = method == "hard" ? "hard" : "soft(" + std::to_string(k) + ")";
    for (const double err : err_grid) {
      om::testing::TestConfig tc;
      tc.n = n;
      tc.d = d;
      tc.v0 = v0;
      tc.v1 = v1_grid;
      tc.err = err;
      tc.alpha = alpha;
      tc.n_mc = n_mc;
      tc.method = method == "hard" ? om::assign::MatchMethod::hard
                                   : om::assign::MatchMethod::soft;
      tc.k = k;
      tc.dirichlet_offset = offset;
      tc.uniform_noise = uniform_noise;
      tc.seed = seed;
      // One base stream for every (method, err) cell: model draws are
      // identical across cells, so the grid is seed-matched by design.
      const om::testing::PowerStudyResult res =
          om::testing::run_power_study(tc, om::Rng(seed), ctx.threads);
      for (const auto& cell : res.cells)
        table.row({fmt(cell.err), fmt(cell.v1), label, fmt(cell.power), fmt(n_mc),
                   fmt(seed)});
      json cv;
      cv["method"] = label;
      cv["err"] = err;
      cv["critical_value"] = res.critical_value;
      critical_values.push_back(std::move(cv));
    }
  }
  table.close();
  json results = json::object();
  results["critical_values"] = std::move(critical_values);
  write_summary(ctx, "power", cfg.resolved(), std::move(results));
}

// ---------------------------------------------------------------------------
// cluster: alignment-method comparison by clustering pairwise distances.

struct ClusterBatch {
  std::vector<om::core::Graph> graphs;  // canonical layout, shuffled
  std::vector<int> labels;
};

void run_cluster_methods(const std::vector<std::string>& methods,
                         const std::vector<ClusterBatch>& reps,
                         const om::core::SeedSplit& split, int embed_d, int anchor,
                         int k_clusters, RunContext& ctx, int n_mc,
                         std::vector<double>& mean_ari,
                         std::vector<Eigen::MatrixXd>& mean_dist) {
  const auto m = static_cast<int>(reps.front().graphs.size());
  std::vector<std::vector<double>> ari(
      methods.size(), std::vector<double>(static_cast<std::size_t>(n_mc), 0.0));
  std::vector<std::vector<Eigen::MatrixXd>> dist(
      methods.size(), std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(n_mc)));
  om::parallel_for(static_cast<std::size_t>(n_mc), ctx.threads, [&](std::size_t r) {
    const ClusterBatch& rep = reps[r];
    om::WarningLog sink;
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      om::assign::MatchMatrix grid;
      if (methods[mi] == "omni") {
        grid = identity_matchings(m, split.u);
      } else {
        const auto mode = methods[mi] == "anchor" ? om::assign::MatchMode::anchor
                                                  : om::assign::MatchMode::pairwise;
        grid = om::assign::omnimatch(rep.graphs, split, embed_d, mode, anchor, &sink);
      }
      const om::metrics::DistanceMatrix d_mat =
          om::metrics::pairwise_distances(rep.graphs, grid);
      const std::vector<int> clusters =
          om::metrics::complete_linkage_clusters(d_mat, k_clusters);
      ari[mi][r] = om::metrics::adjusted_rand_index(clusters, rep.labels);
      dist[mi][r] = d_mat.values;
    }
  });
  mean_ari.assign(methods.size(), 0.0);
  mean_dist.assign(methods.size(), Eigen::MatrixXd::Zero(m, m));
  for (std::size_t mi = 0; mi < methods.size(); ++mi)
    for (int r = 0; r < n_mc; ++r) {
      mean_ari[mi] += ari[mi][static_cast<std::size_t>(r)] / n_mc;
      mean_dist[mi] += dist[mi][static_cast<std::size_t>(r)] / n_mc;
    }
}

void cmd_cluster(Config& cfg, RunContext& ctx) {
  const bool file_mode = cfg.has("inputs");
  const auto methods = cfg.get_string_list("methods", {"omni", "anchor", "pairwise"},
                                           {"omni", "anchor", "pairwise"});
  const int n_mc = cfg.get_int("n_mc", 50, 1, 1000000);
  const std::uint64_t seed = cfg.get_seed("seed", 0);
  const om::Rng base(seed);

  std::vector<ClusterBatch> reps(static_cast<std::size_t>(n_mc));
  om::core::SeedSplit split;
  int embed_d = 0;
  int k_clusters = 0;
  int anchor = -1;
  int u = 0;
  json results = json::object();

  if (file_mode) {
    const auto inputs = cfg.get_string_list("inputs", {});
    if (inputs.size() < 2) throw std::runtime_error("cluster: need at least 2 input graphs");
    if (!cfg.has("labels"))
      throw cfg.required("labels", "with real-data inputs (sidecar file, one subject "
                                   "label per graph, order-matched)");
    const std::string labels_path = cfg.get_string("labels", "");
    const std::string format =
        cfg.get_string("format", "auto", {"auto", "csv", "edgelist"});
    const int n_hint = cfg.get_int("n", 0, 0, 1000000000);
    const bool log1p_weights = cfg.get_bool("log1p", false);
    const auto m_int = static_cast<int>(inputs.size());
    u = cfg.get_int("u", 20, 1, 1000000);
    embed_d = cfg.get_int("embed_d", 0, 0, 1000000);
    const int max_auto_d = cfg.get_int("max_auto_d", 50, 1, 1000000);
    anchor = cfg.get_int("anchor", -1, -1, m_int - 1);
    k_clusters = cfg.get_int("k_clusters", 0, 0, m_int);
    cfg.finish();

    const auto graphs = load_graphs(inputs, format, n_hint, log1p_weights, &ctx.log);
    const int n = graphs.front().n;
    if (u >= n) throw std::runtime_error("cluster: u must be below the vertex count");
    const auto label_tokens = om::io::read_labels(labels_path);
    if (label_tokens.size() != inputs.size())
      throw std::runtime_error(labels_path + ": " + std::to_string(label_tokens.size()) +
                               " labels for " + std::to_string(inputs.size()) + " graphs");
    std::vector<int> labels;
    std::map<std::string, int> label_ids;
    for (const auto& t : label_tokens)
      labels.push_back(label_ids.emplace(t, static_cast<int>(label_ids.size())).first->second);
    if (k_clusters == 0) k_clusters = static_cast<int>(label_ids.size());
    if (anchor < 0) anchor = m_int - 1;
    split = om::core::SeedSplit::canonical(n - u, u);
    if (embed_d == 0) {
      Eigen::VectorXd scree;
      embed_d = auto_embed_dim(graphs, std::min({max_auto_d, n - u}), ctx, &scree);
      om::io::CsvWriter sw(ctx.path("scree.csv"), {"index", "magnitude"},
                           ctx.preamble("mean-adjacency spectrum magnitudes"));
      for (Eigen::Index i = 0; i < scree.size(); ++i)
        sw.row({fmt(static_cast<int>(i)), fmt(scree(i))});
      sw.close();
      results["chosen_d"] = embed_d;
    }
    if (n - u < embed_d)
      throw std::runtime_error("cluster: n - u leaves fewer than embed_d seeds");

    for (int r = 0; r < n_mc; ++r) {
      om::Rng rng = base.child(static_cast<std::uint64_t>(r));
      std::vector<int> chosen = om::shuffled_indices(n, rng);
      chosen.resize(static_cast<std::size_t>(u));
      std::sort(chosen.begin(), chosen.end());
      std::vector<int> seeds_first = canonical_order(chosen, n);
      std::vector<int> order(seeds_first.begin() + u, seeds_first.end());
      order.insert(order.end(), seeds_first.begin(), seeds_first.begin() + u);
      ClusterBatch& rep = reps[static_cast<std::size_t>(r)];
      rep.labels = labels;
      for (const auto& g : graphs) {
        const om::core::PermutationMap q = om::models::random_shuffle(u, rng);
        rep.graphs.push_back(om::core::apply_shuffle(reorder_graph(g, order), split, q));
      }
    }
  } else {
    const int subjects = cfg.get_int("subjects", 10, 2, 10000);
    const int draws = cfg.get_int("draws_per_subject", 10, 1, 10000);
    const int n = cfg.get_int("n", 100, 4, 1000000);
    const int d = cfg.get_int("d", 3, 1, 1000);
    const int offset = cfg.get_int("dirichlet_offset", 1, 1, 1000);
    u = cfg.get_int("u", 50, 1, n - 1);
    embed_d = cfg.get_int("embed_d", d, 1, 1000);
    const int m_int = subjects * draws;
    anchor = cfg.get_int("anchor", -1, -1, m_int - 1);
    k_clusters = cfg.get_int("k_clusters", 0, 0, m_int);
    cfg.finish();
    if (n - u < embed_d)
      throw std::runtime_error("cluster: n - u leaves fewer than embed_d seeds");
    if (k_clusters == 0) k_clusters = subjects;
    if (anchor < 0) anchor = m_int - 1;
    split = om::core::SeedSplit::canonical(n - u, u);

    om::parallel_for(static_cast<std::size_t>(n_mc), ctx.threads, [&](std::size_t r) {
      om::Rng rng = base.child(r);
      ClusterBatch& rep = reps[r];
      for (int subj = 0; subj < subjects; ++subj) {
        const auto x = om::models::sample_dirichlet_latents(n, d, d + offset, rng);
        for (int t = 0; t < draws; ++t) {
          om::core::Graph g = om::models::sample_rdpg(x, rng);
          const om::core::PermutationMap q = om::models::random_shuffle(u, rng);
          rep.graphs.push_back(om::core::apply_shuffle(g, split, q));
          rep.labels.push_back(subj);
        }
      }
    });
  }

  std::vector<double> mean_ari;
  std::vector<Eigen::MatrixXd> mean_dist;
  run_cluster_methods(methods, reps, split, embed_d, anchor, k_clusters, ctx, n_mc,
                      mean_ari, mean_dist);

  om::io::CsvWriter table(ctx.path("ari.csv"),
                          {"method", "u", "mean_ari", "n_mc", "seed"},
                          ctx.preamble("mean adjusted Rand index per alignment method"));
  for (std::size_t mi = 0; mi < methods.size(); ++mi)
    table.row({methods[mi], fmt(u), fmt(mean_ari[mi]), fmt(n_mc), fmt(seed)});
  table.close();
  for (std::size_t mi = 0; mi < methods.size(); ++mi)
    om::io::write_matrix_csv(
        ctx.path("distances_" + methods[mi] + ".csv"), mean_dist[mi],
        ctx.preamble("mean pairwise aligned-graph distances; row/col = graph index"));
  results["anchor"] = anchor;
  results["embed_d"] = embed_d;
  results["k_clusters"] = k_clusters;
  write_summary(ctx, "cluster", cfg.resolved(), std::move(results));
}

// ---------------------------------------------------------------------------
// ingest-embeddings: embedding matrices -> cosine-similarity graphs.

std::string corpus_name(const std::string& path, std::set<std::string>& used, int index) {
  std::string stem = std::filesystem::path(path).stem().string();
  std::string clean;
  for (const char c : stem)
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') clean += c;
  if (clean.empty()) clean = "corpus" + std::to_string(index);
  std::string name = clean;
  int suffix = 2;
  while (!used.insert(name).second) name = clean + "_" + std::to_string(suffix++);
  return name;
}

void cmd_ingest_embeddings(Config& cfg, RunContext& ctx) {
  if (!cfg.has("inputs"))
    throw cfg.required("inputs", "(one embedding CSV per corpus, rows aligned across "
                                 "corpora)");
  const auto inputs = cfg.get_string_list("inputs", {});
  const double threshold = cfg.get_real("threshold", 0.0, 0.0, 1.0);
  cfg.finish();

  json corpora = json::array();
  std::set<std::string> used;
  Eigen::Index rows = -1;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const Eigen::MatrixXd emb = om::io::read_matrix_csv(inputs[i]);
    if (rows < 0)
      rows = emb.rows();
    else if (emb.rows() != rows)
      throw std::runtime_error(inputs[i] + ": " + std::to_string(emb.rows()) +
                               " rows, but " + inputs.front() + " has " +
                               std::to_string(rows) +
                               " (corpora must be row-aligned)");
    const om::core::Graph g =
        om::io::cosine_similarity_graph(emb, threshold, &ctx.log);
    const std::string name = corpus_name(inputs[i], used, static_cast<int>(i));
    const std::string file = "cosine_" + name + ".csv";
    om::io::write_matrix_csv(ctx.path(file), g.weights,
                             ctx.preamble("cosine-similarity graph; row/col = item index"));
    json entry;
    entry["input"] = inputs[i];
    entry["output"] = file;
    entry["rows"] = static_cast<std::int64_t>(rows);
    entry["dims"] = static_cast<std::int64_t>(emb.cols());
    corpora.push_back(std::move(entry));
  }
  json results = json::object();
  results["corpora"] = std::move(corpora);
  write_summary(ctx, "ingest-embeddings", cfg.resolved(), std::move(results));
}

}  // namespace

int main(int argc, char** argv) {
  // The eigensolver is driven from explicitly threaded replicate loops; keep
  // the BLAS backend single-threaded so nested pools never oversubscribe and
  // reductions keep a fixed summation order (outputs must be reproducible).
  setenv("OPENBLAS_NUM_THREADS", "1", 1);

  CLI::App app{"seeded multiple-graph matching experiments"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string out_dir = ".";
  std::string config_path;
  bool no_timestamp = false;
  app.add_option("--seed", seed, "RNG seed (overrides the config's seed)");
  app.add_option("--threads", threads, "replicate-level worker threads")
      ->check(CLI::PositiveNumber);
  app.add_option("--out-dir", out_dir, "output directory (created if missing)");
  app.add_option("--config", config_path, "JSON config document");
  app.add_flag("--no-timestamp", no_timestamp,
               "omit generated-timestamp lines from outputs");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"match", "matching accuracy on the graph-pair model, or matchings on files"},
      {"multimatch", "pairwise distances and anomaly ranking across a collection"},
      {"power", "Monte-Carlo level/power of the shuffled two-sample test"},
      {"cluster", "alignment-method comparison by clustering pairwise distances"},
      {"ingest-embeddings", "embedding matrices to cosine-similarity graphs"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, desc] : commands) {
    subs[name] = app.add_subcommand(name, desc);
    subs[name]->fallthrough();
  }

  CLI11_PARSE(app, argc, argv);

  try {
    json doc = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::runtime_error(config_path + ": cannot open config");
      try {
        doc = json::parse(in);
      } catch (const json::parse_error& e) {
        throw std::runtime_error(config_path + ": " + e.what());
      }
    }
    if (app.count("--seed") > 0) doc["seed"] = seed;

    RunContext ctx;
    ctx.out_dir = out_dir;
    ctx.no_timestamp = no_timestamp;
    ctx.threads = threads;
    std::filesystem::create_directories(out_dir);

    std::string name;
    for (const auto& [sub_name, sub] : subs)
      if (sub->parsed()) name = sub_name;
    Config cfg(std::move(doc), name);
    if (name == "match")
      cmd_match(cfg, ctx);
    else if (name == "multimatch")
      cmd_multimatch(cfg, ctx);
    else if (name == "power")
      cmd_power(cfg, ctx);
    else if (name == "cluster")
      cmd_cluster(cfg, ctx);
    else
      cmd_ingest_embeddings(cfg, ctx);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
