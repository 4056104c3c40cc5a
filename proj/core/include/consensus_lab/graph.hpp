#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace consensus_lab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Directed, weighted edge. Information flows from `from` into `to`, so the
/// edge populates the Laplacian entry (to, from). Indices are 0-based.
struct Edge {
  int from = 0;
  int to = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// A network of agents plus one virtual source node that sets the desired
/// consensus value. `node_count` includes the source.
struct GraphSpec {
  int node_count = 0;
  int source = 0;
  std::vector<Edge> edges;

  int agent_count() const noexcept { return node_count - 1; }

  friend bool operator==(const GraphSpec&, const GraphSpec&) = default;
};

/// Throws Error(kValidation) on self-edges, non-positive or non-finite
/// weights, duplicate ordered pairs, or out-of-range indices.
void validate(const GraphSpec& graph);

/// Parses the JSON graph document
///   {"nodes": N, "source": S, "edges": [[from, to, weight], ...]}
/// with 1-based node ids.
GraphSpec parse_graph(std::string_view text);

/// Inverse of parse_graph; emits 1-based ids.
std::string emit_graph(const GraphSpec& graph);

/// Full (n+1)x(n+1) Laplacian in graph-node order. Row i holds -a_ij for each
/// in-neighbour j and the in-weight sum on the diagonal, so every row sums to 0.
Matrix build_laplacian(const GraphSpec& graph);

/// Pinned Laplacian K and source coupling B. Row r of K corresponds to graph
/// node node_order[r]; the source row and column are removed.
struct PinnedSystem {
  Matrix K;
  Vector B;
  std::vector<int> node_order;

  int size() const noexcept { return static_cast<int>(B.size()); }
};

PinnedSystem pin(const GraphSpec& graph);

/// Validates a PinnedSystem built by hand: dimensions, finite entries and
/// zero row sums of [K | -B]. The sign pattern is not enforced because
/// perturbed systems carry positive off-diagonal entries.
void validate(const PinnedSystem& system);

/// Parses {"K": [[...], ...], "B": [...]} describing a pinned system directly.
/// Used for perturbed systems that are not graph Laplacians.
PinnedSystem parse_pinned(std::string_view text);
std::string emit_pinned(const PinnedSystem& system);

struct Reachability {
  bool rooted = false;
  /// 0-based graph node ids not reachable from the source, ascending.
  std::vector<int> unreachable;
};

/// Breadth-first search from the source along edge direction.
Reachability check_rooted(const GraphSpec& graph);

/// Solves K x = B. For a rooted graph the result is the all-ones vector.
/// Throws Error(kNumerical) when K is singular or the residual exceeds 1e-9.
Vector consensus_direction(const PinnedSystem& system);

/// Four-agent chain 4 -> 3 -> 2 -> 1 with 3 <-> 4 bidirectional and the
/// source feeding agent 4. Node 5 (index 4) is the source.
GraphSpec example_network();

/// Example pinned Laplacian with an extra coupling `e` on agent 2:
///   [[1,-1,0,0],[e,1-e,-1,0],[0,0,1,-1],[0,0,-1,2]], B = [0,0,0,1].
/// Requires e >= 0.
PinnedSystem perturbed_example(double e);

}  // namespace consensus_lab
