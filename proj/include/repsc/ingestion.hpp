#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "repsc/graph.hpp"

namespace repsc {

struct WeightedEdge {
  int src = 0;
  int dst = 0;
  double weight = 0.0;
  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

/// Layers of weighted directed edges over a shared node set.
struct MultiplexNetwork {
  int n = 0;
  std::vector<std::vector<WeightedEdge>> layers;  ///< sorted by (src, dst)
  std::vector<long long> layer_ids;               ///< file id of each layer, ascending
  std::vector<std::string> node_names;            ///< empty or size n

  int layer_count() const noexcept { return static_cast<int>(layers.size()); }
  /// Indices of all layers whose file id lies in [first_id, last_id].
  /// Throws LayerOutOfRange when none does.
  std::vector<int> layers_in_id_range(long long first_id, long long last_id) const;
};

struct MultiplexParseOptions {
  int index_base = 1;  ///< node ids in the file start here
};

/// Parses `layer src dst weight` lines (whitespace separated).
///
/// Blank lines and lines starting with `#` are skipped. An optional first
/// data line `nodes=<N> layers=<L>` fixes the node count and is checked
/// against the layers actually seen. Repeated (layer, src, dst) entries are
/// summed. Layer ids are sorted and renumbered 0..L-1.
///
/// Errors: MalformedLine (message carries the line number), IndexOutOfRange,
/// NoLayers.
MultiplexNetwork parse_multiplex(std::istream& in, const MultiplexParseOptions& opts = {});
MultiplexNetwork load_multiplex(const std::string& path, const MultiplexParseOptions& opts = {});

/// Writes the header line followed by one line per edge, which
/// parse_multiplex reads back to an equal network.
void write_multiplex(std::ostream& out, const MultiplexNetwork& net, int index_base = 1);

/// One name per line; the count must equal net.n.
void attach_node_names(MultiplexNetwork& net, std::istream& names);

/// Undirected k-nearest-neighbor graph of one layer.
///
/// The pair weight is w(i, j) + w(j, i). Each node selects its k heaviest
/// neighbors (ties go to the lower index, fewer than k available means all
/// of them), and an edge is kept when either endpoint selected it.
/// Self-loops are ignored.
BinarySymmetricGraph knn_layer_graph(const MultiplexNetwork& net, int layer, int k);

/// Entrywise OR of the inputs; `force_diagonal` sets every self-loop.
BinarySymmetricGraph aggregate_layers(const std::vector<BinarySymmetricGraph>& graphs, bool force_diagonal);

struct PrunedGraphs {
  BinarySymmetricGraph similarity;
  BinarySymmetricGraph representation;
  std::vector<std::string> node_names;  ///< empty when none were given
  std::vector<int> kept;                ///< original index of each remaining node
};

/// Repeatedly removes nodes without a neighbor (self-loops excluded) in
/// either graph until none is left, remapping both graphs and the names.
PrunedGraphs drop_isolated_nodes(const BinarySymmetricGraph& g, const BinarySymmetricGraph& r,
                                 const std::vector<std::string>& names = {});

}  // namespace repsc
