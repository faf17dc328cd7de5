#include "repsc/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace repsc {

namespace {

template <typename T>
bool parse_number(const std::string& token, T& value) {
  const char* first = token.data();
  const char* last = first + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

[[noreturn]] void malformed(std::size_t line, const std::string& why) {
  fail(ErrorCode::MalformedLine, "line " + std::to_string(line) + ": " + why);
}

bool skippable(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

struct Header {
  long long nodes = -1;
  long long layers = -1;
};

Header parse_header(const std::string& line, std::size_t line_no) {
  Header h;
  std::istringstream is(line);
  std::string field;
  while (is >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) malformed(line_no, "header field without '=': " + field);
    const std::string key = field.substr(0, eq);
    long long value = 0;
    if (!parse_number(field.substr(eq + 1), value) || value < 0)
      malformed(line_no, "bad header value: " + field);
    if (key == "nodes")
      h.nodes = value;
    else if (key == "layers")
      h.layers = value;
    else
      malformed(line_no, "unknown header key: " + key);
  }
  return h;
}

}  // namespace

std::vector<int> MultiplexNetwork::layers_in_id_range(long long first_id, long long last_id) const {
  std::vector<int> out;
  for (int l = 0; l < layer_count(); ++l)
    if (layer_ids[static_cast<std::size_t>(l)] >= first_id && layer_ids[static_cast<std::size_t>(l)] <= last_id)
      out.push_back(l);
  require(!out.empty(), ErrorCode::LayerOutOfRange,
          "no layer with id in " + std::to_string(first_id) + ".." + std::to_string(last_id));
  return out;
}

MultiplexNetwork parse_multiplex(std::istream& in, const MultiplexParseOptions& opts) {
  std::map<long long, std::map<std::pair<int, int>, double>> layers;
  Header header;
  bool seen_data = false;
  long long max_index = -1;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    if (!seen_data && line.find("nodes=") != std::string::npos) {
      header = parse_header(line, line_no);
      seen_data = true;
      continue;
    }
    seen_data = true;

    std::istringstream is(line);
    std::string tok[4], extra;
    if (!(is >> tok[0] >> tok[1] >> tok[2] >> tok[3])) malformed(line_no, "expected 'layer src dst weight'");
    if (is >> extra) malformed(line_no, "trailing field '" + extra + "'");
    long long layer = 0, src = 0, dst = 0;
    double weight = 0.0;
    if (!parse_number(tok[0], layer)) malformed(line_no, "bad layer id '" + tok[0] + "'");
    if (!parse_number(tok[1], src)) malformed(line_no, "bad source '" + tok[1] + "'");
    if (!parse_number(tok[2], dst)) malformed(line_no, "bad target '" + tok[2] + "'");
    if (!parse_number(tok[3], weight) || !std::isfinite(weight) || weight < 0.0)
      malformed(line_no, "bad weight '" + tok[3] + "'");

    src -= opts.index_base;
    dst -= opts.index_base;
    if (src < 0 || dst < 0 || (header.nodes >= 0 && (src >= header.nodes || dst >= header.nodes)))
      fail(ErrorCode::IndexOutOfRange, "line " + std::to_string(line_no) + ": node index outside range");
    if (src > std::numeric_limits<int>::max() - 1 || dst > std::numeric_limits<int>::max() - 1)
      fail(ErrorCode::IndexOutOfRange, "line " + std::to_string(line_no) + ": node index too large");
    max_index = std::max({max_index, src, dst});
    layers[layer][{static_cast<int>(src), static_cast<int>(dst)}] += weight;
  }

  require(!layers.empty(), ErrorCode::NoLayers, "multiplex input contains no edges");
  if (header.layers >= 0)
    require(static_cast<long long>(layers.size()) == header.layers, ErrorCode::MalformedLine,
            "header declares " + std::to_string(header.layers) + " layers, found " +
                std::to_string(layers.size()));

  MultiplexNetwork net;
  net.n = static_cast<int>(header.nodes >= 0 ? header.nodes : max_index + 1);
  for (const auto& [id, edges] : layers) {
    net.layer_ids.push_back(id);
    std::vector<WeightedEdge>& out = net.layers.emplace_back();
    out.reserve(edges.size());
    for (const auto& [key, w] : edges) out.push_back({key.first, key.second, w});
  }
  return net;
}

MultiplexNetwork load_multiplex(const std::string& path, const MultiplexParseOptions& opts) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path);
  return parse_multiplex(in, opts);
}

void write_multiplex(std::ostream& out, const MultiplexNetwork& net, int index_base) {
  out << "nodes=" << net.n << " layers=" << net.layer_count() << '\n';
  const auto old_precision = out.precision(17);
  for (int l = 0; l < net.layer_count(); ++l)
    for (const WeightedEdge& e : net.layers[static_cast<std::size_t>(l)])
      out << net.layer_ids[static_cast<std::size_t>(l)] << ' ' << e.src + index_base << ' '
          << e.dst + index_base << ' ' << e.weight << '\n';
  out.precision(old_precision);
}

void attach_node_names(MultiplexNetwork& net, std::istream& names) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(names, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out.push_back(line);
  }
  require(static_cast<int>(out.size()) == net.n, ErrorCode::SizeMismatch,
          "name file lists " + std::to_string(out.size()) + " names for " + std::to_string(net.n) + " nodes");
  net.node_names = std::move(out);
}

BinarySymmetricGraph knn_layer_graph(const MultiplexNetwork& net, int layer, int k) {
  require(k >= 1, ErrorCode::InvalidParameter, "knn: k must be >= 1");
  require(layer >= 0 && layer < net.layer_count(), ErrorCode::LayerOutOfRange,
          "layer index " + std::to_string(layer) + " outside [0," + std::to_string(net.layer_count()) + ")");

  std::vector<std::map<int, double>> neighbours(static_cast<std::size_t>(net.n));
  for (const WeightedEdge& e : net.layers[static_cast<std::size_t>(layer)]) {
    if (e.src == e.dst) continue;
    neighbours[static_cast<std::size_t>(e.src)][e.dst] += e.weight;
    neighbours[static_cast<std::size_t>(e.dst)][e.src] += e.weight;
  }

  Matrix adj = Matrix::Zero(net.n, net.n);
  std::vector<std::pair<double, int>> ranked;
  for (int i = 0; i < net.n; ++i) {
    ranked.clear();
    for (const auto& [j, w] : neighbours[static_cast<std::size_t>(i)]) ranked.emplace_back(w, j);
    const auto take = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(k));
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take), ranked.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
    for (std::size_t t = 0; t < take; ++t) {
      adj(i, ranked[t].second) = 1.0;
      adj(ranked[t].second, i) = 1.0;
    }
  }
  return BinarySymmetricGraph(std::move(adj), false);
}

BinarySymmetricGraph aggregate_layers(const std::vector<BinarySymmetricGraph>& graphs, bool force_diagonal) {
  require(!graphs.empty(), ErrorCode::NoLayers, "aggregate_layers: no graphs given");
  const Eigen::Index n = graphs.front().n();
  Matrix adj = Matrix::Zero(n, n);
  bool loops = force_diagonal;
  for (const BinarySymmetricGraph& g : graphs) {
    require(g.n() == n, ErrorCode::SizeMismatch, "aggregate_layers: graphs differ in node count");
    adj = adj.cwiseMax(g.adjacency());
    loops = loops || g.allows_self_loops();
  }
  if (force_diagonal) adj.diagonal().setOnes();
  return BinarySymmetricGraph(std::move(adj), loops);
}

PrunedGraphs drop_isolated_nodes(const BinarySymmetricGraph& g, const BinarySymmetricGraph& r,
                                 const std::vector<std::string>& names) {
  require(g.n() == r.n(), ErrorCode::SizeMismatch, "similarity and representation graphs differ in size");
  require(names.empty() || static_cast<Eigen::Index>(names.size()) == g.n(), ErrorCode::SizeMismatch,
          "name list differs from node count");

  std::vector<int> kept(static_cast<std::size_t>(g.n()));
  for (int i = 0; i < g.n(); ++i) kept[static_cast<std::size_t>(i)] = i;
  Matrix ga = g.adjacency();
  Matrix ra = r.adjacency();

  for (;;) {
    std::vector<int> keep;
    for (Eigen::Index i = 0; i < ga.rows(); ++i) {
      const double g_off = ga.row(i).sum() - ga(i, i);
      const double r_off = ra.row(i).sum() - ra(i, i);
      if (g_off > 0.0 && r_off > 0.0) keep.push_back(static_cast<int>(i));
    }
    if (static_cast<Eigen::Index>(keep.size()) == ga.rows()) break;
    const auto m = static_cast<Eigen::Index>(keep.size());
    Matrix gn(m, m), rn(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b) {
        gn(a, b) = ga(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(b)]);
        rn(a, b) = ra(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(b)]);
      }
    std::vector<int> remapped;
    remapped.reserve(keep.size());
    for (int idx : keep) remapped.push_back(kept[static_cast<std::size_t>(idx)]);
    kept = std::move(remapped);
    ga = std::move(gn);
    ra = std::move(rn);
    if (m == 0) break;
  }

  PrunedGraphs out{BinarySymmetricGraph(std::move(ga), g.allows_self_loops()),
                   BinarySymmetricGraph(std::move(ra), r.allows_self_loops()), {}, kept};
  if (!names.empty())
    for (int idx : kept) out.node_names.push_back(names[static_cast<std::size_t>(idx)]);
  return out;
}

}  // namespace repsc
