#include "repsc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

namespace repsc {

BinarySymmetricGraph::BinarySymmetricGraph(Matrix adjacency, bool allows_self_loops)
    : adjacency_(std::move(adjacency)), allows_self_loops_(allows_self_loops) {
  require(adjacency_.rows() >= 1 && adjacency_.cols() >= 1, ErrorCode::EmptyMatrix,
          "graph needs at least one node");
  require(adjacency_.rows() == adjacency_.cols(), ErrorCode::NonSquare, "adjacency must be square");
  const Eigen::Index n = adjacency_.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = adjacency_(i, j);
      require(v == 0.0 || v == 1.0, ErrorCode::InvalidParameter,
              "adjacency entry (" + std::to_string(i) + "," + std::to_string(j) + ") is not 0/1");
      require(v == adjacency_(j, i), ErrorCode::NotSymmetric,
              "adjacency not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
    require(allows_self_loops_ || adjacency_(j, j) == 0.0, ErrorCode::InvalidParameter,
            "self-loop at node " + std::to_string(j) + " in a loop-free graph");
  }
}

BinarySymmetricGraph BinarySymmetricGraph::empty(Eigen::Index n, bool allows_self_loops) {
  return BinarySymmetricGraph(Matrix::Zero(n, n), allows_self_loops);
}

BinarySymmetricGraph BinarySymmetricGraph::from_edges(Eigen::Index n,
                                                      const std::vector<std::pair<int, int>>& edges,
                                                      bool allows_self_loops) {
  Matrix adj = Matrix::Zero(n, n);
  for (const auto& [i, j] : edges) {
    require(i >= 0 && j >= 0 && i < n && j < n, ErrorCode::IndexOutOfRange,
            "edge (" + std::to_string(i) + "," + std::to_string(j) + ") outside [0," +
                std::to_string(n) + ")");
    adj(i, j) = 1.0;
    adj(j, i) = 1.0;
  }
  return BinarySymmetricGraph(std::move(adj), allows_self_loops);
}

std::size_t BinarySymmetricGraph::edge_count() const {
  std::size_t count = 0;
  for (Eigen::Index j = 0; j < n(); ++j)
    for (Eigen::Index i = 0; i < j; ++i) count += adjacency_(i, j) != 0.0;
  return count;
}

std::vector<std::pair<int, int>> BinarySymmetricGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (Eigen::Index i = 0; i < n(); ++i)
    for (Eigen::Index j = i; j < n(); ++j)
      if (adjacency_(i, j) != 0.0) out.emplace_back(static_cast<int>(i), static_cast<int>(j));
  return out;
}

ClusterAssignment::ClusterAssignment(std::vector<int> labels, int k)
    : labels_(std::move(labels)), k_(k) {
  require(k_ >= 1, ErrorCode::InvalidParameter, "cluster count must be >= 1");
  require(!labels_.empty(), ErrorCode::InvalidParameter, "assignment is empty");
  std::vector<int> seen(static_cast<std::size_t>(k_), 0);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const int l = labels_[i];
    require(l >= 0 && l < k_, ErrorCode::IndexOutOfRange,
            "label " + std::to_string(l) + " of node " + std::to_string(i) + " outside [0," +
                std::to_string(k_) + ")");
    seen[static_cast<std::size_t>(l)] = 1;
  }
  for (int c = 0; c < k_; ++c)
    require(seen[static_cast<std::size_t>(c)] != 0, ErrorCode::EmptyCluster,
            "cluster " + std::to_string(c) + " has no members");
}

ClusterAssignment ClusterAssignment::contiguous(int n, int k) {
  require(k >= 1 && n >= k, ErrorCode::InvalidParameter, "need 1 <= k <= n");
  require(n % k == 0, ErrorCode::DivisibilityViolated,
          std::to_string(k) + " does not divide " + std::to_string(n));
  std::vector<int> labels(static_cast<std::size_t>(n));
  const int size = n / k;
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i / size;
  return ClusterAssignment(std::move(labels), k);
}

std::vector<int> ClusterAssignment::cluster_sizes() const {
  std::vector<int> sizes(static_cast<std::size_t>(k_), 0);
  for (int l : labels_) ++sizes[static_cast<std::size_t>(l)];
  return sizes;
}

Matrix ClusterAssignment::indicator() const {
  Matrix theta = Matrix::Zero(size(), k_);
  for (int i = 0; i < size(); ++i) theta(i, labels_[static_cast<std::size_t>(i)]) = 1.0;
  return theta;
}

void RppParams::validate() const {
  require(1.0 >= p && p >= q && q >= r && r >= s && s >= 0.0, ErrorCode::InvalidParameter,
          "R-PP probabilities must satisfy 1 >= p >= q >= r >= s >= 0");
  require(rep_graph.n() == assignment.size(), ErrorCode::SizeMismatch,
          "representation graph and assignment sizes differ");
}

double RppParams::edge_probability(Eigen::Index i, Eigen::Index j) const {
  const bool same = assignment[static_cast<std::size_t>(i)] == assignment[static_cast<std::size_t>(j)];
  const bool linked = rep_graph.has_edge(i, j);
  if (linked) return same ? p : q;
  return same ? r : s;
}

namespace {

// Offset sets of a block-circulant representation graph: node i of cluster a
// links to node (i + o) mod m of cluster b for every o in the set of (a, b).
// All diagonal blocks share `own`; `cross[pair_index(a, b)]` serves a < b and
// its transpose serves b < a.
struct BlockDesign {
  std::vector<int> own;
  std::vector<std::vector<int>> cross;
};

int pair_index(int a, int b, int k) { return a * k - a * (a + 1) / 2 + (b - a - 1); }

// Symmetric circulant on m nodes with exactly `width` ones per row, the
// diagonal included.
std::vector<int> circulant_offsets(int m, int width) {
  std::vector<int> offsets{0};
  const int others = width - 1;
  for (int h = 1; h <= others / 2; ++h) {
    offsets.push_back(h);
    offsets.push_back(m - h);
  }
  if (others % 2 == 1) offsets.push_back(m / 2);
  return offsets;
}

BlockDesign window_design(int m, int k, int width) {
  BlockDesign design{circulant_offsets(m, width), {}};
  std::vector<int> window(static_cast<std::size_t>(width));
  std::iota(window.begin(), window.end(), 0);
  design.cross.assign(static_cast<std::size_t>(k * (k - 1) / 2), window);
  return design;
}

// `count` distinct entries of `pool`, by a partial Fisher-Yates shuffle.
std::vector<int> draw_distinct(std::vector<int> pool, int count, std::mt19937_64& gen) {
  for (int i = 0; i < count; ++i) {
    const std::size_t span = pool.size() - static_cast<std::size_t>(i);
    const auto j = static_cast<std::size_t>(i) +
                   std::min(static_cast<std::size_t>(unit_draw(gen()) * static_cast<double>(span)), span - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(count));
  return pool;
}

// Scattered offsets. For even m, every cross block gets the same parity
// balance sum_o (-1)^o as the diagonal block, so the block symbols at
// frequency m/2 form a rank-one matrix and R gains at least k-1 null vectors.
std::optional<BlockDesign> scattered_design(int m, int k, int width, std::mt19937_64& gen) {
  std::vector<int> halves;
  for (int h = 1; 2 * h < m; ++h) halves.push_back(h);
  const int pairs = (width - 1) / 2;
  if (pairs > static_cast<int>(halves.size())) return std::nullopt;

  BlockDesign design;
  design.own = {0};
  if ((width - 1) % 2 == 1) design.own.push_back(m / 2);
  for (int h : draw_distinct(halves, pairs, gen)) {
    design.own.push_back(h);
    design.own.push_back(m - h);
  }

  std::vector<int> all(static_cast<std::size_t>(m)), evens, odds;
  std::iota(all.begin(), all.end(), 0);
  for (int o = 0; o < m; ++o) (o % 2 == 0 ? evens : odds).push_back(o);
  int even_count = 0;
  if (m % 2 == 0) {
    int balance = 0;
    for (int o : design.own) balance += o % 2 == 0 ? 1 : -1;
    even_count = (width + balance) / 2;
    if (even_count < 0 || even_count > m / 2 || width - even_count > m / 2) return std::nullopt;
  }
  for (int c = 0; c < k * (k - 1) / 2; ++c) {
    if (m % 2 == 0) {
      std::vector<int> offsets = draw_distinct(evens, even_count, gen);
      const std::vector<int> odd = draw_distinct(odds, width - even_count, gen);
      offsets.insert(offsets.end(), odd.begin(), odd.end());
      design.cross.push_back(std::move(offsets));
    } else {
      design.cross.push_back(draw_distinct(all, width, gen));
    }
  }
  return design;
}

struct DesignSpectrum {
  double second = 0.0;  ///< largest eigenvalue over the nonzero frequencies
  int nullity = 0;
};

// R is block circulant, so its spectrum is the union over frequencies f of
// the eigenvalues of the k x k Hermitian matrix of block symbols at f.
DesignSpectrum design_spectrum(const BlockDesign& design, int m, int k, int width) {
  using Complex = std::complex<double>;
  const double pi = std::acos(-1.0);
  const auto symbol = [&](const std::vector<int>& offsets, int f) {
    Complex sum = 0.0;
    for (int o : offsets) sum += std::polar(1.0, -2.0 * pi * static_cast<double>((f * o) % m) / m);
    return sum;
  };
  DesignSpectrum out;
  out.second = -std::numeric_limits<double>::infinity();
  const double zero_tol = 1e-9 * width * k;
  for (int f = 0; f < m; ++f) {
    Eigen::MatrixXcd block(k, k);
    const Complex own = symbol(design.own, f);
    for (int a = 0; a < k; ++a) {
      block(a, a) = own;
      for (int b = a + 1; b < k; ++b) {
        block(a, b) = symbol(design.cross[static_cast<std::size_t>(pair_index(a, b, k))], f);
        block(b, a) = std::conj(block(a, b));
      }
    }
    const Vector values = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(block, Eigen::EigenvaluesOnly).eigenvalues();
    out.nullity += static_cast<int>((values.array().abs() <= zero_tol).count());
    if (f > 0) out.second = std::max(out.second, values.maxCoeff());
  }
  return out;
}

// Window design first, then a fixed pseudo-random family of scattered
// designs. Keeps the candidate with the smallest second spectrum among
// those with rank(R) <= n - k; falls back to the window design if none does.
BlockDesign choose_design(int m, int k, int width) {
  constexpr int kCandidates = 32;
  std::mt19937_64 gen(0x5eedc1a55e5ULL);
  BlockDesign best = window_design(m, k, width);
  DesignSpectrum best_spectrum = design_spectrum(best, m, k, width);
  bool feasible = best_spectrum.nullity >= k;
  for (int c = 0; c < kCandidates; ++c) {
    std::optional<BlockDesign> cand = scattered_design(m, k, width, gen);
    if (!cand) continue;
    const DesignSpectrum spec = design_spectrum(*cand, m, k, width);
    if (spec.nullity < k) continue;
    if (!feasible || spec.second < best_spectrum.second - 1e-9) {
      best = std::move(*cand);
      best_spectrum = spec;
      feasible = true;
    }
  }
  return best;
}

Matrix circulant_block(int m, const std::vector<int>& offsets) {
  Matrix block = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int o : offsets) block(i, (i + o) % m) = 1.0;
  return block;
}

}  // namespace

RepGraphInstance build_d_regular_rep_graph(int n, int k, int d) {
  require(k >= 1 && n >= 1, ErrorCode::InvalidParameter, "n and k must be positive");
  require(n % k == 0, ErrorCode::DivisibilityViolated,
          "k=" + std::to_string(k) + " does not divide n=" + std::to_string(n));
  require(d % k == 0, ErrorCode::DivisibilityViolated,
          "k=" + std::to_string(k) + " does not divide d=" + std::to_string(d));
  require(d >= k && d <= n, ErrorCode::DegreeOutOfRange,
          "need k <= d <= n, got d=" + std::to_string(d));
  const int m = n / k;
  const int width = d / k;
  // An odd block with an even width has an odd degree sum among its
  // off-diagonal entries, so no symmetric block exists.
  require(!((width - 1) % 2 == 1 && m % 2 == 1), ErrorCode::DegreeOutOfRange,
          "d/k=" + std::to_string(width) + " is even but n/k=" + std::to_string(m) +
              " is odd; no symmetric block with a full diagonal exists");

  const BlockDesign design = choose_design(m, k, width);
  const Matrix own = circulant_block(m, design.own);
  Matrix adj(n, n);
  for (int a = 0; a < k; ++a) {
    adj.block(a * m, a * m, m, m) = own;
    for (int b = a + 1; b < k; ++b) {
      const Matrix cross = circulant_block(m, design.cross[static_cast<std::size_t>(pair_index(a, b, k))]);
      adj.block(a * m, b * m, m, m) = cross;
      adj.block(b * m, a * m, m, m) = cross.transpose();
    }
  }

  return {BinarySymmetricGraph(std::move(adj), true), ClusterAssignment::contiguous(n, k)};
}

std::string AssumptionReport::summary() const {
  std::ostringstream os;
  os << "regular=" << (regular ? "yes" : "no") << " degree=" << degree
     << " full_diagonal=" << (full_diagonal ? "yes" : "no")
     << " balanced_per_cluster=" << (balanced_per_cluster ? "yes" : "no")
     << " violations=" << violations.size();
  return os.str();
}

AssumptionReport validate_assumption_41(const BinarySymmetricGraph& r, const ClusterAssignment& a) {
  require(r.n() == a.size(), ErrorCode::SizeMismatch, "graph and assignment sizes differ");
  const int n = static_cast<int>(r.n());
  const int k = a.k();

  std::vector<int> degrees(static_cast<std::size_t>(n));
  std::map<int, int> histogram;
  for (int i = 0; i < n; ++i) {
    degrees[static_cast<std::size_t>(i)] = static_cast<int>(r.degree(i));
    ++histogram[degrees[static_cast<std::size_t>(i)]];
  }
  int modal = histogram.begin()->first;
  int best = 0;
  for (const auto& [deg, count] : histogram)
    if (count > best) {
      best = count;
      modal = deg;
    }

  AssumptionReport report;
  report.degree = modal;
  report.regular = histogram.size() == 1;
  report.full_diagonal = true;
  report.balanced_per_cluster = true;
  const bool divisible = modal % k == 0;
  const int share = modal / k;

  for (int i = 0; i < n; ++i) {
    NodeViolation v;
    v.node = i;
    v.degree = degrees[static_cast<std::size_t>(i)];
    v.per_cluster.assign(static_cast<std::size_t>(k), 0);
    for (int j = 0; j < n; ++j)
      if (r.has_edge(i, j)) ++v.per_cluster[static_cast<std::size_t>(a[static_cast<std::size_t>(j)])];
    v.missing_self_loop = !r.has_edge(i, i);
    const bool unbalanced =
        !divisible || std::any_of(v.per_cluster.begin(), v.per_cluster.end(),
                                  [share](int c) { return c != share; });
    if (v.missing_self_loop) report.full_diagonal = false;
    if (unbalanced) report.balanced_per_cluster = false;
    if (v.missing_self_loop || unbalanced || v.degree != modal) report.violations.push_back(std::move(v));
  }
  return report;
}

BinarySymmetricGraph sample_rpp(const RppParams& params, std::uint64_t seed) {
  params.validate();
  const Eigen::Index n = params.rep_graph.n();
  std::mt19937_64 gen(seed);
  Matrix adj = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (unit_draw(gen()) < params.edge_probability(i, j)) {
        adj(i, j) = 1.0;
        adj(j, i) = 1.0;
      }
    }
  }
  return BinarySymmetricGraph(std::move(adj), false);
}

RepGraphInstance sample_planted_partition_rep_graph(int n, int groups, double p_in, double p_out,
                                                    std::uint64_t seed) {
  require(p_in >= 0.0 && p_in <= 1.0 && p_out >= 0.0 && p_out <= 1.0, ErrorCode::InvalidParameter,
          "planted partition probabilities must lie in [0,1]");
  ClusterAssignment labels = ClusterAssignment::contiguous(n, groups);
  std::mt19937_64 gen(seed);
  Matrix adj = Matrix::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double prob = labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)]
                              ? p_in
                              : p_out;
      if (unit_draw(gen()) < prob) {
        adj(i, j) = 1.0;
        adj(j, i) = 1.0;
      }
    }
  }
  return {BinarySymmetricGraph(std::move(adj), true), std::move(labels)};
}

Matrix expected_adjacency(const RppParams& params) {
  params.validate();
  const Eigen::Index n = params.rep_graph.n();
  const Matrix& rep = params.rep_graph.adjacency();
  const Matrix ones = Matrix::Ones(n, n);

  // sum_k G_k X G_k keeps the within-cluster entries of X.
  Matrix same = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      same(i, j) = params.assignment[static_cast<std::size_t>(i)] ==
                   params.assignment[static_cast<std::size_t>(j)];

  Matrix tilde = params.q * rep + params.s * (ones - rep) +
                 (params.p - params.q) * same.cwiseProduct(rep) +
                 (params.r - params.s) * same.cwiseProduct(ones - rep);
  tilde.diagonal().setZero();
  return tilde;
}

BinarySymmetricGraph permute_nodes(const BinarySymmetricGraph& g, std::span<const int> perm) {
  const Eigen::Index n = g.n();
  require(static_cast<Eigen::Index>(perm.size()) == n, ErrorCode::SizeMismatch,
          "permutation length differs from node count");
  Matrix adj(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      adj(i, j) = g.adjacency()(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  return BinarySymmetricGraph(std::move(adj), g.allows_self_loops());
}

ClusterAssignment permute_nodes(const ClusterAssignment& a, std::span<const int> perm) {
  require(static_cast<int>(perm.size()) == a.size(), ErrorCode::SizeMismatch,
          "permutation length differs from node count");
  std::vector<int> labels(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) labels[i] = a[static_cast<std::size_t>(perm[i])];
  return ClusterAssignment(std::move(labels), a.k());
}

void write_edge_list(std::ostream& out, const BinarySymmetricGraph& g) {
  out << "n=" << g.n() << " diag=" << (g.allows_self_loops() ? 1 : 0) << '\n';
  for (const auto& [i, j] : g.edges()) out << i << ' ' << j << '\n';
}

BinarySymmetricGraph read_edge_list(std::istream& in) {
  std::string line;
  int line_no = 0;
  long n = -1;
  int diag = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    if (std::sscanf(line.c_str(), "n=%ld diag=%d", &n, &diag) != 2 || n < 1 || (diag != 0 && diag != 1))
      fail(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": expected 'n=<N> diag=<0|1>'");
    break;
  }
  require(n >= 1, ErrorCode::MalformedLine, "missing edge-list header");

  std::vector<std::pair<int, int>> edges;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::istringstream ls(line);
    long i = 0;
    long j = 0;
    std::string rest;
    if (!(ls >> i >> j) || (ls >> rest))
      fail(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": expected 'i j'");
    require(i >= 0 && j >= 0 && i < n && j < n, ErrorCode::IndexOutOfRange,
            "line " + std::to_string(line_no) + ": node index outside [0," + std::to_string(n) + ")");
    edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
  }
  return BinarySymmetricGraph::from_edges(n, edges, diag == 1);
}

void save_edge_list(const std::string& path, const BinarySymmetricGraph& g) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + path);
  write_edge_list(out, g);
}

BinarySymmetricGraph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot read " + path);
  return read_edge_list(in);
}

void write_assignment(std::ostream& out, const ClusterAssignment& a) {
  for (int l : a.labels()) out << l << '\n';
}

ClusterAssignment read_assignment(std::istream& in) {
  std::vector<int> labels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::istringstream ls(line);
    int l = 0;
    std::string rest;
    if (!(ls >> l) || (ls >> rest))
      fail(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": expected one label");
    labels.push_back(l);
  }
  require(!labels.empty(), ErrorCode::MalformedLine, "assignment file is empty");
  const int k = *std::max_element(labels.begin(), labels.end()) + 1;
  return ClusterAssignment(std::move(labels), k);
}

}  // namespace repsc
