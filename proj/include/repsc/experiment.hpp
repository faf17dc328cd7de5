#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "repsc/clustering.hpp"

namespace repsc {

enum class ExperimentMode { DRegularSweep, PlantedPartitionSweep, RealNetwork, ExpectedCaseCheck };

enum class Algorithm { Usc, Nsc, URepSC, NRepSC, URepSCApprox, NRepSCApprox, FairScBaseline };

std::string to_string(ExperimentMode mode);
std::string to_string(Algorithm algorithm);
ExperimentMode parse_mode(const std::string& name);
Algorithm parse_algorithm(const std::string& name);
/// Whether the algorithm consumes the rank axis (rank of R, or group count P).
bool uses_rank(Algorithm algorithm);

/// Seeded sweep description.
///
/// Text form: one `key = value` per line, `#` starts a comment, lists are
/// comma separated. Keys:
///
///     mode            d_regular_sweep | planted_partition_sweep | real_network | expected_case_check
///     algorithms      usc, nsc, urepsc, nrepsc, urepsc_approx, nrepsc_approx, fair_sc_baseline
///     N, K, d         integer lists (N is ignored in real_network mode)
///     rank            integer list or `auto` (= N/10)
///     p, q, r, s      R-PP probabilities
///     p_in, p_out     planted-partition probabilities for R
///     groups          protected-group count for planted_partition_sweep
///     trials          repetitions per grid point, seed = base_seed + trial
///     base_seed       unsigned integer
///     kmeans_restarts, kmeans_max_iters, kmeans_tol
///     epsilon         slack in the bound-shape columns
///     theory          true | false: emit gamma and bound-shape columns
///     similarity, representation, truth   edge-list / label files for real_network
///     out             output directory
///     plot            true | false: write SVG charts next to the CSVs
///     threads         worker count
struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::DRegularSweep;
  std::vector<Algorithm> algorithms{Algorithm::Usc, Algorithm::URepSC};
  std::vector<int> n_values{1200};
  std::vector<int> k_values{5};
  std::vector<int> d_values{40};
  std::vector<int> rank_values{-1};  ///< -1 means N/10
  double p = 0.4, q = 0.3, r = 0.2, s = 0.1;
  double p_in = 0.8, p_out = 0.2;
  int groups = 2;
  int trials = 10;
  std::uint64_t base_seed = 0;
  KMeansConfig kmeans;
  double epsilon = 0.0;
  bool theory = true;
  std::string similarity_path, representation_path, truth_path;
  std::string out_dir = "results";
  bool plot = false;
  int threads = 1;

  /// Applies one key; throws Config on an unknown key or a bad value.
  void set(const std::string& key, const std::string& value);
  /// Throws Config on an empty axis, trials < 1 or out-of-order probabilities.
  void validate() const;

  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig load(const std::string& path);
};

/// One CSV row: a single (grid point, trial, algorithm) execution.
struct ResultRow {
  ExperimentMode mode = ExperimentMode::DRegularSweep;
  Algorithm algorithm = Algorithm::Usc;
  int n = 0, k = 0;
  std::optional<int> d, rank;
  std::optional<double> p, q, r, s;
  int trial = 0;
  std::uint64_t seed = 0;
  std::optional<double> accuracy_nodes, mistake_fraction, rcut, ncut, avg_balance, min_balance,
      max_representation_residual, balance_over_rcut, gamma, bound_shape_unnormalized, bound_shape_normalized;
  double runtime_ms = 0.0;
  std::string error;  ///< empty on success
};

struct MetricStat {
  double mean = 0.0;
  double stddev = 0.0;  ///< sample standard deviation, 0 for a single value
  int count = 0;
};

/// Mean and spread over trials for one (mode, algorithm, N, K, d, rank) key.
struct AggregateRow {
  ExperimentMode mode = ExperimentMode::DRegularSweep;
  Algorithm algorithm = Algorithm::Usc;
  int n = 0, k = 0;
  std::optional<int> d, rank;
  int rows = 0, errors = 0;
  std::map<std::string, MetricStat> metrics;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;  ///< ordered by grid point, trial, algorithm, rank
  bool has_errors() const;
};

/// Group-fairness baseline: clusters R with usc into `groups` protected
/// groups, then runs urepsc (or nrepsc) under the block-diagonal
/// representation graph those groups induce. groups = 1 puts every node
/// in one group.
ClusteringResult fair_sc_baseline(const Matrix& adjacency, const Matrix& rep, int k, int groups,
                                  const KMeansConfig& cfg, bool normalized = false);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows);

const std::vector<std::string>& result_columns();
void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool include_runtime = true);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
/// One line chart per metric against the first axis that varies.
void write_svg_plots(const std::string& dir, const std::vector<AggregateRow>& rows);

/// Writes results.csv, aggregate.csv and (if cfg.plot) the SVG charts into
/// cfg.out_dir, creating it when needed.
void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result);

}  // namespace repsc
