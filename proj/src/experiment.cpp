#include "repsc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "repsc/metrics.hpp"
#include "repsc/theory.hpp"

namespace repsc {

namespace {

// ---------------------------------------------------------------- names

struct ModeName {
  ExperimentMode mode;
  const char* name;
};
constexpr ModeName kModes[] = {{ExperimentMode::DRegularSweep, "d_regular_sweep"},
                               {ExperimentMode::PlantedPartitionSweep, "planted_partition_sweep"},
                               {ExperimentMode::RealNetwork, "real_network"},
                               {ExperimentMode::ExpectedCaseCheck, "expected_case_check"}};

struct AlgorithmName {
  Algorithm algorithm;
  const char* name;
};
constexpr AlgorithmName kAlgorithms[] = {{Algorithm::Usc, "usc"},
                                         {Algorithm::Nsc, "nsc"},
                                         {Algorithm::URepSC, "urepsc"},
                                         {Algorithm::NRepSC, "nrepsc"},
                                         {Algorithm::URepSCApprox, "urepsc_approx"},
                                         {Algorithm::NRepSCApprox, "nrepsc_approx"},
                                         {Algorithm::FairScBaseline, "fair_sc_baseline"}};

// ---------------------------------------------------------------- config parsing

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void config_error(const std::string& key, const std::string& why) {
  fail(ErrorCode::Config, "config key '" + key + "': " + why);
}

std::vector<std::string> split_list(const std::string& key, const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) config_error(key, "empty list element");
    out.push_back(item);
  }
  if (out.empty()) config_error(key, "empty list");
  return out;
}

long long to_integer(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    config_error(key, "not an integer: " + text);
  }
  if (used != text.size()) config_error(key, "not an integer: " + text);
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  const long long v = to_integer(key, text);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    config_error(key, "out of range: " + text);
  return static_cast<int>(v);
}

double to_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    config_error(key, "not a number: " + text);
  }
  if (used != text.size() || !std::isfinite(v)) config_error(key, "not a number: " + text);
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  config_error(key, "expected true or false, got " + text);
}

std::vector<int> to_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  for (const std::string& item : split_list(key, value)) out.push_back(to_int(key, item));
  return out;
}

// ---------------------------------------------------------------- formatting

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }
std::string format_optional(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else if (c == '\n' || c == '\r') out += ' ';
    else out += c;
  }
  return out + "\"";
}

// Metric columns shared by the row and aggregate writers.
struct MetricColumn {
  const char* name;
  std::optional<double> ResultRow::*field;
};
constexpr MetricColumn kMetricColumns[] = {
    {"accuracy_nodes", &ResultRow::accuracy_nodes},
    {"mistake_fraction", &ResultRow::mistake_fraction},
    {"rcut", &ResultRow::rcut},
    {"ncut", &ResultRow::ncut},
    {"avg_balance", &ResultRow::avg_balance},
    {"min_balance", &ResultRow::min_balance},
    {"max_representation_residual", &ResultRow::max_representation_residual},
    {"balance_over_rcut", &ResultRow::balance_over_rcut},
    {"gamma", &ResultRow::gamma},
    {"bound_shape_unnormalized", &ResultRow::bound_shape_unnormalized},
    {"bound_shape_normalized", &ResultRow::bound_shape_normalized},
};

// ---------------------------------------------------------------- running

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct GridPoint {
  int n = 0, k = 0;
  std::optional<int> d;
};

struct TheoryColumns {
  std::optional<double> gamma, unnormalized, normalized;
};

// Similarity input, representation graph and (optional) truth for one trial.
struct Instance {
  Matrix adjacency;
  std::optional<BinarySymmetricGraph> rep;
  std::optional<ClusterAssignment> truth;
};

struct SharedInputs {
  std::optional<BinarySymmetricGraph> similarity;
  std::optional<BinarySymmetricGraph> representation;
  std::optional<ClusterAssignment> truth;
};

bool rpp_mode(ExperimentMode m) { return m != ExperimentMode::RealNetwork; }

RppParams d_regular_params(const ExperimentConfig& cfg, const GridPoint& g) {
  RepGraphInstance inst = build_d_regular_rep_graph(g.n, g.k, *g.d);
  return RppParams{std::move(inst.assignment), std::move(inst.graph), cfg.p, cfg.q, cfg.r, cfg.s};
}

Instance build_instance(const ExperimentConfig& cfg, const GridPoint& g, std::uint64_t seed,
                        const SharedInputs& shared) {
  switch (cfg.mode) {
    case ExperimentMode::DRegularSweep: {
      RppParams params = d_regular_params(cfg, g);
      Matrix adj = sample_rpp(params, seed).adjacency();
      return {std::move(adj), std::move(params.rep_graph), std::move(params.assignment)};
    }
    case ExperimentMode::ExpectedCaseCheck: {
      RppParams params = d_regular_params(cfg, g);
      Matrix adj = expected_adjacency(params);
      return {std::move(adj), std::move(params.rep_graph), std::move(params.assignment)};
    }
    case ExperimentMode::PlantedPartitionSweep: {
      RepGraphInstance rep = sample_planted_partition_rep_graph(g.n, cfg.groups, cfg.p_in, cfg.p_out, seed);
      RppParams params{ClusterAssignment::contiguous(g.n, g.k), std::move(rep.graph), cfg.p, cfg.q, cfg.r, cfg.s};
      Matrix adj = sample_rpp(params, splitmix64(seed)).adjacency();
      return {std::move(adj), std::move(params.rep_graph), std::move(params.assignment)};
    }
    case ExperimentMode::RealNetwork:
      break;
  }
  return {shared.similarity->adjacency(), *shared.representation, shared.truth};
}

ClusteringResult run_algorithm(Algorithm algorithm, const Instance& inst, int k, std::optional<int> rank,
                               const KMeansConfig& km) {
  const Matrix& rep = inst.rep->adjacency();
  switch (algorithm) {
    case Algorithm::Usc: return usc(inst.adjacency, k, km);
    case Algorithm::Nsc: return nsc(inst.adjacency, k, km);
    case Algorithm::URepSC: return urepsc(inst.adjacency, rep, k, km);
    case Algorithm::NRepSC: return nrepsc(inst.adjacency, rep, k, km);
    case Algorithm::URepSCApprox: return urepsc_approx(inst.adjacency, rep, k, *rank, km);
    case Algorithm::NRepSCApprox: return nrepsc_approx(inst.adjacency, rep, k, *rank, km);
    case Algorithm::FairScBaseline: return fair_sc_baseline(inst.adjacency, rep, k, *rank, km);
  }
  fail(ErrorCode::InvalidParameter, "unknown algorithm");
}

int resolve_rank(int rank, int n) { return rank < 0 ? std::max(1, n / 10) : rank; }

ResultRow row_template(const ExperimentConfig& cfg, const GridPoint& g, int trial, std::uint64_t seed) {
  ResultRow row;
  row.mode = cfg.mode;
  row.n = g.n;
  row.k = g.k;
  row.d = g.d;
  if (rpp_mode(cfg.mode)) {
    row.p = cfg.p;
    row.q = cfg.q;
    row.r = cfg.r;
    row.s = cfg.s;
  }
  row.trial = trial;
  row.seed = seed;
  return row;
}

std::string describe(const std::exception& e) {
  if (dynamic_cast<const Error*>(&e) != nullptr) return e.what();
  return std::string("unexpected: ") + e.what();
}

std::vector<ResultRow> run_unit(const ExperimentConfig& cfg, const GridPoint& g, int trial,
                                const TheoryColumns& theory, const SharedInputs& shared) {
  const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(trial);
  KMeansConfig km = cfg.kmeans;
  km.seed = seed;

  // (algorithm, rank) jobs in output order.
  std::vector<std::pair<Algorithm, std::optional<int>>> jobs;
  for (Algorithm a : cfg.algorithms) {
    if (!uses_rank(a)) {
      jobs.emplace_back(a, std::nullopt);
      continue;
    }
    std::set<int> seen;
    for (int rank : cfg.rank_values) {
      const int resolved = resolve_rank(rank, g.n);
      if (seen.insert(resolved).second) jobs.emplace_back(a, resolved);
    }
  }

  std::vector<ResultRow> rows;
  std::optional<Instance> inst;
  std::string instance_error;
  try {
    inst = build_instance(cfg, g, seed, shared);
  } catch (const std::exception& e) {
    instance_error = describe(e);
  }

  for (const auto& [algorithm, rank] : jobs) {
    ResultRow row = row_template(cfg, g, trial, seed);
    row.algorithm = algorithm;
    row.rank = rank;
    row.gamma = theory.gamma;
    row.bound_shape_unnormalized = theory.unnormalized;
    row.bound_shape_normalized = theory.normalized;
    if (!inst) {
      row.error = instance_error;
      rows.push_back(std::move(row));
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    try {
      const ClusteringResult result = run_algorithm(algorithm, *inst, g.k, rank, km);
      const PartitionScore score = score_partition(inst->adjacency, *inst->rep,
                                                   inst->truth ? &*inst->truth : nullptr, result.assignment);
      row.accuracy_nodes = score.accuracy;
      row.mistake_fraction = score.mistake_fraction;
      row.rcut = score.rcut;
      row.ncut = score.ncut;
      row.avg_balance = score.avg_balance;
      row.min_balance = score.min_balance;
      row.max_representation_residual = score.max_representation_residual;
      row.balance_over_rcut = score.balance_over_rcut;
    } catch (const std::exception& e) {
      row.error = describe(e);
    }
    row.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(std::move(row));
  }
  return rows;
}

TheoryColumns compute_theory(const ExperimentConfig& cfg, const GridPoint& g) {
  TheoryColumns out;
  if (!cfg.theory || !g.d) return out;
  try {
    const RppParams params = d_regular_params(cfg, g);
    const ExpectedSpectrum spectrum = expected_spectrum(params);
    out.gamma = spectrum.gamma;
    const BoundShape shape = theorem_bound_shape(params, spectrum, cfg.epsilon);
    out.unnormalized = shape.unnormalized;
    out.normalized = shape.normalized;
  } catch (const Error&) {
    // Leave the columns empty; any instance-level problem resurfaces in the rows.
  }
  return out;
}

// Runs fn(i) for i in [0, count) on `threads` workers.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  for (std::thread& t : pool) t.join();
}

// ---------------------------------------------------------------- svg

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

void write_chart(const std::string& path, const std::string& metric, const std::string& axis,
                 std::vector<Series> series) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (auto& s : series) {
    std::sort(s.points.begin(), s.points.end());
    for (const auto& [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!std::isfinite(xmin)) return;
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;

  const double w = 640, h = 400, left = 70, right = 180, top = 30, bottom = 50;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (w - left - right); };
  auto sy = [&](double y) { return h - bottom - (y - ymin) / (ymax - ymin) * (h - top - bottom); };
  static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};

  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << w / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" << metric << " vs "
      << axis << "</text>\n"
      << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - right << "\" y2=\"" << h - bottom
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom
      << "\" stroke=\"black\"/>\n";
  for (double x : {xmin, xmax})
    out << "<text x=\"" << sx(x) << "\" y=\"" << h - bottom + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
        << format_double(x) << "</text>\n";
  for (double y : {ymin, ymax})
    out << "<text x=\"" << left - 6 << "\" y=\"" << sy(y) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
        << format_double(y) << "</text>\n";
  out << "<text x=\"" << (left + w - right) / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\" font-size=\"12\">"
      << axis << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* colour = colours[i % std::size(colours)];
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : series[i].points) out << sx(x) << ',' << sy(y) << ' ';
    out << "\"/>\n";
    for (const auto& [x, y] : series[i].points)
      out << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"3\" fill=\"" << colour << "\"/>\n";
    const double ly = top + 16.0 * static_cast<double>(i);
    out << "<text x=\"" << w - right + 10 << "\" y=\"" << ly + 4 << "\" font-size=\"11\" fill=\"" << colour
        << "\">" << series[i].label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace

// ---------------------------------------------------------------- public

std::string to_string(ExperimentMode mode) {
  for (const auto& m : kModes)
    if (m.mode == mode) return m.name;
  return "unknown";
}

std::string to_string(Algorithm algorithm) {
  for (const auto& a : kAlgorithms)
    if (a.algorithm == algorithm) return a.name;
  return "unknown";
}

ExperimentMode parse_mode(const std::string& name) {
  for (const auto& m : kModes)
    if (name == m.name) return m.mode;
  fail(ErrorCode::Config, "unknown mode '" + name + "'");
}

Algorithm parse_algorithm(const std::string& name) {
  for (const auto& a : kAlgorithms)
    if (name == a.name) return a.algorithm;
  fail(ErrorCode::Config, "unknown algorithm '" + name + "'");
}

bool uses_rank(Algorithm algorithm) {
  return algorithm == Algorithm::URepSCApprox || algorithm == Algorithm::NRepSCApprox ||
         algorithm == Algorithm::FairScBaseline;
}

void ExperimentConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (value.empty()) config_error(key, "missing value");
  if (key == "mode") {
    mode = parse_mode(value);
  } else if (key == "algorithms") {
    algorithms.clear();
    for (const std::string& a : split_list(key, value)) algorithms.push_back(parse_algorithm(a));
  } else if (key == "N") {
    n_values = to_int_list(key, value);
  } else if (key == "K") {
    k_values = to_int_list(key, value);
  } else if (key == "d") {
    d_values = to_int_list(key, value);
  } else if (key == "rank") {
    rank_values.clear();
    for (const std::string& item : split_list(key, value)) rank_values.push_back(item == "auto" ? -1 : to_int(key, item));
  } else if (key == "p") {
    p = to_double(key, value);
  } else if (key == "q") {
    q = to_double(key, value);
  } else if (key == "r") {
    r = to_double(key, value);
  } else if (key == "s") {
    s = to_double(key, value);
  } else if (key == "p_in") {
    p_in = to_double(key, value);
  } else if (key == "p_out") {
    p_out = to_double(key, value);
  } else if (key == "groups") {
    groups = to_int(key, value);
  } else if (key == "trials") {
    trials = to_int(key, value);
  } else if (key == "base_seed" || key == "seed") {
    const long long v = to_integer(key, value);
    if (v < 0) config_error(key, "must be >= 0");
    base_seed = static_cast<std::uint64_t>(v);
  } else if (key == "kmeans_restarts") {
    kmeans.restarts = to_int(key, value);
  } else if (key == "kmeans_max_iters") {
    kmeans.max_iters = to_int(key, value);
  } else if (key == "kmeans_tol") {
    kmeans.rel_tol = to_double(key, value);
  } else if (key == "epsilon") {
    epsilon = to_double(key, value);
  } else if (key == "theory") {
    theory = to_bool(key, value);
  } else if (key == "similarity") {
    similarity_path = value;
  } else if (key == "representation") {
    representation_path = value;
  } else if (key == "truth") {
    truth_path = value;
  } else if (key == "out") {
    out_dir = value;
  } else if (key == "plot") {
    plot = to_bool(key, value);
  } else if (key == "threads") {
    threads = to_int(key, value);
  } else {
    config_error(key, "unknown key");
  }
}

void ExperimentConfig::validate() const {
  auto check = [](bool ok, const std::string& what) { require(ok, ErrorCode::Config, what); };
  check(!algorithms.empty(), "algorithms must not be empty");
  check(mode == ExperimentMode::RealNetwork || !n_values.empty(), "N must not be empty");
  check(!k_values.empty(), "K must not be empty");
  check(!rank_values.empty(), "rank must not be empty");
  check(trials >= 1, "trials must be >= 1");
  check(threads >= 1, "threads must be >= 1");
  check(epsilon >= 0.0, "epsilon must be >= 0");
  for (int n : n_values) check(n >= 1, "N values must be >= 1");
  for (int k : k_values) check(k >= 2, "K values must be >= 2");
  for (int rk : rank_values) check(rk == -1 || rk >= 1, "rank values must be >= 1 or auto");
  try {
    kmeans.validate();
  } catch (const Error& e) {
    fail(ErrorCode::Config, e.what());
  }
  if (rpp_mode(mode))
    check(p <= 1.0 && p >= q && q >= r && r >= s && s >= 0.0, "probabilities must satisfy 1 >= p >= q >= r >= s >= 0");
  if (mode == ExperimentMode::DRegularSweep || mode == ExperimentMode::ExpectedCaseCheck) {
    check(!d_values.empty(), "d must not be empty");
    for (int d : d_values) check(d >= 1, "d values must be >= 1");
  }
  if (mode == ExperimentMode::PlantedPartitionSweep) {
    check(groups >= 1, "groups must be >= 1");
    check(p_in >= 0.0 && p_in <= 1.0 && p_out >= 0.0 && p_out <= 1.0, "p_in and p_out must lie in [0, 1]");
  }
  if (mode == ExperimentMode::RealNetwork)
    check(!similarity_path.empty() && !representation_path.empty(),
          "real_network needs 'similarity' and 'representation' edge-list paths");
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, ErrorCode::Config,
            "config line " + std::to_string(line_no) + ": expected key = value");
    cfg.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open config " + path);
  return parse(in);
}

bool ExperimentResult::has_errors() const {
  return std::any_of(rows.begin(), rows.end(), [](const ResultRow& r) { return !r.error.empty(); });
}

ClusteringResult fair_sc_baseline(const Matrix& adjacency, const Matrix& rep, int k, int groups,
                                  const KMeansConfig& cfg, bool normalized) {
  require(groups >= 1, ErrorCode::InvalidParameter, "fair_sc_baseline: groups must be >= 1");
  const Eigen::Index n = rep.rows();
  std::vector<int> group(static_cast<std::size_t>(n), 0);
  if (groups > 1) group = usc(rep, groups, cfg).assignment.labels();

  Matrix induced(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      induced(i, j) = group[static_cast<std::size_t>(i)] == group[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
  return normalized ? nrepsc(adjacency, induced, k, cfg) : urepsc(adjacency, induced, k, cfg);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();

  SharedInputs shared;
  std::vector<GridPoint> grid;
  if (cfg.mode == ExperimentMode::RealNetwork) {
    shared.similarity = load_edge_list(cfg.similarity_path);
    shared.representation = load_edge_list(cfg.representation_path);
    if (!cfg.truth_path.empty()) {
      std::ifstream in(cfg.truth_path);
      require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + cfg.truth_path);
      shared.truth = read_assignment(in);
    }
    const int n = static_cast<int>(shared.similarity->n());
    for (int k : cfg.k_values) grid.push_back({n, k, std::nullopt});
  } else if (cfg.mode == ExperimentMode::PlantedPartitionSweep) {
    for (int n : cfg.n_values)
      for (int k : cfg.k_values) grid.push_back({n, k, std::nullopt});
  } else {
    for (int n : cfg.n_values)
      for (int k : cfg.k_values)
        for (int d : cfg.d_values) grid.push_back({n, k, d});
  }

  std::vector<TheoryColumns> theory(grid.size());
  parallel_for(grid.size(), cfg.threads, [&](std::size_t i) { theory[i] = compute_theory(cfg, grid[i]); });

  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  std::vector<std::vector<ResultRow>> buffer(grid.size() * trials);
  parallel_for(buffer.size(), cfg.threads, [&](std::size_t unit) {
    const std::size_t gi = unit / trials;
    const int trial = static_cast<int>(unit % trials);
    buffer[unit] = run_unit(cfg, grid[gi], trial, theory[gi], shared);
  });

  ExperimentResult result;
  for (auto& rows : buffer)
    for (auto& row : rows) result.rows.push_back(std::move(row));
  return result;
}

std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows) {
  std::vector<AggregateRow> out;
  std::vector<std::map<std::string, std::vector<double>>> samples;
  auto same_key = [](const AggregateRow& a, const ResultRow& r) {
    return a.mode == r.mode && a.algorithm == r.algorithm && a.n == r.n && a.k == r.k && a.d == r.d &&
           a.rank == r.rank;
  };
  for (const ResultRow& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const AggregateRow& a) { return same_key(a, r); });
    std::size_t idx = static_cast<std::size_t>(it - out.begin());
    if (it == out.end()) {
      AggregateRow a;
      a.mode = r.mode;
      a.algorithm = r.algorithm;
      a.n = r.n;
      a.k = r.k;
      a.d = r.d;
      a.rank = r.rank;
      out.push_back(std::move(a));
      samples.emplace_back();
      idx = out.size() - 1;
    }
    ++out[idx].rows;
    if (!r.error.empty()) {
      ++out[idx].errors;
      continue;
    }
    for (const MetricColumn& c : kMetricColumns)
      if (const auto& v = r.*c.field) samples[idx][c.name].push_back(*v);
    samples[idx]["runtime_ms"].push_back(r.runtime_ms);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (const auto& [name, values] : samples[i]) {
      MetricStat st;
      st.count = static_cast<int>(values.size());
      for (double v : values) st.mean += v;
      st.mean /= static_cast<double>(st.count);
      if (st.count > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - st.mean) * (v - st.mean);
        st.stddev = std::sqrt(ss / static_cast<double>(st.count - 1));
      }
      out[i].metrics[name] = st;
    }
  }
  return out;
}

const std::vector<std::string>& result_columns() {
  static const std::vector<std::string> columns = [] {
    std::vector<std::string> c{"mode", "algorithm", "N", "K", "d", "rank", "p", "q", "r", "s", "trial", "seed"};
    for (const MetricColumn& m : kMetricColumns) c.emplace_back(m.name);
    c.emplace_back("runtime_ms");
    c.emplace_back("error");
    return c;
  }();
  return columns;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool include_runtime) {
  bool first = true;
  for (const std::string& c : result_columns()) {
    if (!include_runtime && c == "runtime_ms") continue;
    out << (first ? "" : ",") << c;
    first = false;
  }
  out << '\n';
  for (const ResultRow& r : rows) {
    out << to_string(r.mode) << ',' << to_string(r.algorithm) << ',' << r.n << ',' << r.k << ','
        << format_optional(r.d) << ',' << format_optional(r.rank) << ',' << format_optional(r.p) << ','
        << format_optional(r.q) << ',' << format_optional(r.r) << ',' << format_optional(r.s) << ',' << r.trial
        << ',' << r.seed;
    for (const MetricColumn& c : kMetricColumns) out << ',' << format_optional(r.*c.field);
    if (include_runtime) out << ',' << format_double(r.runtime_ms);
    out << ',' << csv_escape(r.error) << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "mode,algorithm,N,K,d,rank,rows,errors";
  std::vector<std::string> metrics;
  for (const MetricColumn& c : kMetricColumns) metrics.emplace_back(c.name);
  metrics.emplace_back("runtime_ms");
  for (const std::string& m : metrics) out << ',' << m << "_mean," << m << "_std";
  out << '\n';
  for (const AggregateRow& a : rows) {
    out << to_string(a.mode) << ',' << to_string(a.algorithm) << ',' << a.n << ',' << a.k << ','
        << format_optional(a.d) << ',' << format_optional(a.rank) << ',' << a.rows << ',' << a.errors;
    for (const std::string& m : metrics) {
      const auto it = a.metrics.find(m);
      if (it == a.metrics.end())
        out << ",,";
      else
        out << ',' << format_double(it->second.mean) << ',' << format_double(it->second.stddev);
    }
    out << '\n';
  }
}

void write_svg_plots(const std::string& dir, const std::vector<AggregateRow>& rows) {
  if (rows.empty()) return;
  struct Axis {
    const char* name;
    double (*get)(const AggregateRow&);
  };
  const Axis axes[] = {
      {"N", [](const AggregateRow& a) { return static_cast<double>(a.n); }},
      {"rank", [](const AggregateRow& a) { return a.rank ? static_cast<double>(*a.rank) : -1.0; }},
      {"d", [](const AggregateRow& a) { return a.d ? static_cast<double>(*a.d) : -1.0; }},
      {"K", [](const AggregateRow& a) { return static_cast<double>(a.k); }},
  };
  const Axis* axis = &axes[0];
  for (const Axis& ax : axes) {
    std::set<double> values;
    for (const AggregateRow& a : rows) values.insert(ax.get(a));
    if (values.size() > 1) {
      axis = &ax;
      break;
    }
  }

  std::filesystem::create_directories(dir);
  for (const char* metric : {"accuracy_nodes", "avg_balance", "balance_over_rcut", "max_representation_residual"}) {
    std::vector<Series> series;
    for (const AggregateRow& a : rows) {
      const auto it = a.metrics.find(metric);
      if (it == a.metrics.end()) continue;
      std::string label = to_string(a.algorithm);
      for (const Axis& ax : axes) {
        if (&ax == axis) continue;
        const double v = ax.get(a);
        if (v >= 0.0) label += " " + std::string(ax.name) + "=" + format_double(v);
      }
      auto s = std::find_if(series.begin(), series.end(), [&](const Series& x) { return x.label == label; });
      if (s == series.end()) {
        series.push_back({label, {}});
        s = series.end() - 1;
      }
      s->points.emplace_back(axis->get(a), it->second.mean);
    }
    if (!series.empty())
      write_chart(dir + "/" + metric + "_vs_" + axis->name + ".svg", metric, axis->name, std::move(series));
  }
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result) {
  std::filesystem::create_directories(cfg.out_dir);
  {
    std::ofstream out(cfg.out_dir + "/results.csv");
    require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + cfg.out_dir + "/results.csv");
    write_results_csv(out, result.rows);
  }
  const std::vector<AggregateRow> agg = aggregate(result.rows);
  {
    std::ofstream out(cfg.out_dir + "/aggregate.csv");
    require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + cfg.out_dir + "/aggregate.csv");
    write_aggregate_csv(out, agg);
  }
  if (cfg.plot) write_svg_plots(cfg.out_dir + "/plots", agg);
}

}  // namespace repsc
