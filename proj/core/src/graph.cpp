#include "consensus_lab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <utility>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "consensus_lab/error.hpp"

namespace consensus_lab {

using json = nlohmann::json;

namespace {

constexpr double kRowSumTolerance = 1e-12;
constexpr double kSolveResidualTolerance = 1e-9;

json parse_document(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kValidation, fmt::format("malformed document: {}", e.what()));
  }
}

int read_node_id(const json& value, int node_count, std::string_view what) {
  if (!value.is_number_integer()) {
    fail(ErrorKind::kValidation, fmt::format("malformed document: {} must be an integer", what));
  }
  const auto id = value.get<long long>();
  if (id < 1 || id > node_count) {
    fail(ErrorKind::kValidation,
         fmt::format("node id {} out of range [1, {}] in {}", id, node_count, what));
  }
  return static_cast<int>(id - 1);
}

}  // namespace

void validate(const GraphSpec& graph) {
  if (graph.node_count < 2) {
    fail(ErrorKind::kValidation, "graph needs at least one agent besides the source");
  }
  if (graph.source < 0 || graph.source >= graph.node_count) {
    fail(ErrorKind::kValidation, fmt::format("source id {} out of range", graph.source + 1));
  }
  std::set<std::pair<int, int>> seen;
  for (const Edge& e : graph.edges) {
    if (e.from < 0 || e.from >= graph.node_count || e.to < 0 || e.to >= graph.node_count) {
      fail(ErrorKind::kValidation,
           fmt::format("edge ({}->{}) references a missing node", e.from + 1, e.to + 1));
    }
    if (e.from == e.to) {
      fail(ErrorKind::kValidation, fmt::format("self-edge on node {}", e.from + 1));
    }
    if (!std::isfinite(e.weight) || e.weight <= 0.0) {
      fail(ErrorKind::kValidation,
           fmt::format("non-positive weight {} on edge ({}->{})", e.weight, e.from + 1, e.to + 1));
    }
    if (!seen.emplace(e.from, e.to).second) {
      fail(ErrorKind::kValidation,
           fmt::format("duplicate edge ({}->{})", e.from + 1, e.to + 1));
    }
  }
}

GraphSpec parse_graph(std::string_view text) {
  const json doc = parse_document(text);
  if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("source") ||
      !doc.contains("edges")) {
    fail(ErrorKind::kValidation,
         "malformed document: expected an object with \"nodes\", \"source\" and \"edges\"");
  }
  const json& nodes = doc.at("nodes");
  if (!nodes.is_number_integer() || nodes.get<long long>() < 1 ||
      nodes.get<long long>() > 1'000'000) {
    fail(ErrorKind::kValidation, "malformed document: \"nodes\" must be a positive integer");
  }

  GraphSpec graph;
  graph.node_count = nodes.get<int>();
  graph.source = read_node_id(doc.at("source"), graph.node_count, "\"source\"");

  const json& edges = doc.at("edges");
  if (!edges.is_array()) {
    fail(ErrorKind::kValidation, "malformed document: \"edges\" must be an array");
  }
  graph.edges.reserve(edges.size());
  for (const json& item : edges) {
    if (!item.is_array() || item.size() != 3 || !item[2].is_number()) {
      fail(ErrorKind::kValidation,
           "malformed document: each edge must be [from, to, weight]");
    }
    Edge e;
    e.from = read_node_id(item[0], graph.node_count, "edge");
    e.to = read_node_id(item[1], graph.node_count, "edge");
    e.weight = item[2].get<double>();
    graph.edges.push_back(e);
  }
  validate(graph);
  return graph;
}

std::string emit_graph(const GraphSpec& graph) {
  json edges = json::array();
  for (const Edge& e : graph.edges) {
    edges.push_back(json::array({e.from + 1, e.to + 1, e.weight}));
  }
  json doc;
  doc["nodes"] = graph.node_count;
  doc["source"] = graph.source + 1;
  doc["edges"] = std::move(edges);
  return doc.dump();
}

Matrix build_laplacian(const GraphSpec& graph) {
  validate(graph);
  const int size = graph.node_count;
  Matrix laplacian = Matrix::Zero(size, size);
  for (const Edge& e : graph.edges) {
    laplacian(e.to, e.from) -= e.weight;
  }
  // Diagonal from the off-diagonal entries of the same row so the row sum is
  // exactly zero up to the summation order.
  for (int i = 0; i < size; ++i) {
    double in_weight = 0.0;
    for (int j = 0; j < size; ++j) {
      if (j != i) in_weight -= laplacian(i, j);
    }
    laplacian(i, i) = in_weight;
  }
  return laplacian;
}

PinnedSystem pin(const GraphSpec& graph) {
  const Matrix laplacian = build_laplacian(graph);
  PinnedSystem system;
  for (int node = 0; node < graph.node_count; ++node) {
    if (node != graph.source) system.node_order.push_back(node);
  }
  const int n = static_cast<int>(system.node_order.size());
  system.K.resize(n, n);
  system.B.resize(n);
  for (int r = 0; r < n; ++r) {
    const int row = system.node_order[r];
    for (int c = 0; c < n; ++c) {
      system.K(r, c) = laplacian(row, system.node_order[c]);
    }
    system.B(r) = -laplacian(row, graph.source);
  }
  return system;
}

void validate(const PinnedSystem& system) {
  const auto n = system.B.size();
  if (n < 1) fail(ErrorKind::kValidation, "pinned system is empty");
  if (system.K.rows() != n || system.K.cols() != n) {
    fail(ErrorKind::kValidation,
         fmt::format("pinned system dimension mismatch: K is {}x{}, B has {} entries",
                     system.K.rows(), system.K.cols(), n));
  }
  if (!system.K.allFinite() || !system.B.allFinite()) {
    fail(ErrorKind::kValidation, "pinned system has non-finite entries");
  }
  if (static_cast<Eigen::Index>(system.node_order.size()) != n) {
    fail(ErrorKind::kValidation, "pinned system node order has the wrong length");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double row_sum = system.K.row(i).sum() - system.B(i);
    const double scale = std::max(1.0, system.K.row(i).cwiseAbs().sum());
    if (std::abs(row_sum) > kRowSumTolerance * scale) {
      fail(ErrorKind::kValidation,
           fmt::format("row {} of [K | -B] sums to {} instead of 0", i + 1, row_sum));
    }
  }
}

PinnedSystem parse_pinned(std::string_view text) {
  const json doc = parse_document(text);
  if (!doc.is_object() || !doc.contains("K") || !doc.contains("B")) {
    fail(ErrorKind::kValidation, "malformed document: expected an object with \"K\" and \"B\"");
  }
  const json& rows = doc.at("K");
  const json& coupling = doc.at("B");
  if (!rows.is_array() || !coupling.is_array() || rows.empty()) {
    fail(ErrorKind::kValidation, "malformed document: \"K\" and \"B\" must be non-empty arrays");
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  PinnedSystem system;
  system.K.resize(n, n);
  system.B.resize(static_cast<Eigen::Index>(coupling.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      fail(ErrorKind::kValidation, "malformed document: \"K\" must be square");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      const json& v = row[static_cast<std::size_t>(j)];
      if (!v.is_number()) fail(ErrorKind::kValidation, "malformed document: K entries must be numbers");
      system.K(i, j) = v.get<double>();
    }
  }
  for (Eigen::Index i = 0; i < system.B.size(); ++i) {
    const json& v = coupling[static_cast<std::size_t>(i)];
    if (!v.is_number()) fail(ErrorKind::kValidation, "malformed document: B entries must be numbers");
    system.B(i) = v.get<double>();
  }
  for (Eigen::Index i = 0; i < n; ++i) system.node_order.push_back(static_cast<int>(i));
  validate(system);
  return system;
}

std::string emit_pinned(const PinnedSystem& system) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < system.K.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < system.K.cols(); ++j) row.push_back(system.K(i, j));
    rows.push_back(std::move(row));
  }
  json coupling = json::array();
  for (Eigen::Index i = 0; i < system.B.size(); ++i) coupling.push_back(system.B(i));
  json doc;
  doc["K"] = std::move(rows);
  doc["B"] = std::move(coupling);
  return doc.dump();
}

Reachability check_rooted(const GraphSpec& graph) {
  validate(graph);
  std::vector<std::vector<int>> out(static_cast<std::size_t>(graph.node_count));
  for (const Edge& e : graph.edges) out[static_cast<std::size_t>(e.from)].push_back(e.to);

  std::vector<bool> visited(static_cast<std::size_t>(graph.node_count), false);
  std::deque<int> frontier{graph.source};
  visited[static_cast<std::size_t>(graph.source)] = true;
  while (!frontier.empty()) {
    const int node = frontier.front();
    frontier.pop_front();
    for (int next : out[static_cast<std::size_t>(node)]) {
      if (!visited[static_cast<std::size_t>(next)]) {
        visited[static_cast<std::size_t>(next)] = true;
        frontier.push_back(next);
      }
    }
  }

  Reachability result;
  for (int node = 0; node < graph.node_count; ++node) {
    if (!visited[static_cast<std::size_t>(node)]) result.unreachable.push_back(node);
  }
  result.rooted = result.unreachable.empty();
  return result;
}

Vector consensus_direction(const PinnedSystem& system) {
  validate(system);
  const Eigen::FullPivLU<Matrix> lu(system.K);
  if (!lu.isInvertible()) {
    fail(ErrorKind::kNumerical, "pinned Laplacian is singular; is the graph rooted?");
  }
  Vector x = lu.solve(system.B);
  const double residual = (system.K * x - system.B).lpNorm<Eigen::Infinity>();
  if (!x.allFinite() || residual > kSolveResidualTolerance) {
    fail(ErrorKind::kNumerical, fmt::format("K x = B residual {} exceeds tolerance", residual));
  }
  return x;
}

GraphSpec example_network() {
  GraphSpec graph;
  graph.node_count = 5;
  graph.source = 4;
  graph.edges = {
      {4, 3, 1.0}, {3, 2, 1.0}, {2, 3, 1.0}, {2, 1, 1.0}, {1, 0, 1.0},
  };
  return graph;
}

PinnedSystem perturbed_example(double e) {
  if (!(e >= 0.0) || !std::isfinite(e)) {
    fail(ErrorKind::kValidation, fmt::format("perturbation must be finite and >= 0, got {}", e));
  }
  PinnedSystem system;
  system.K.resize(4, 4);
  // clang-format off
  system.K << 1.0, -1.0,     0.0,  0.0,
              e,    1.0 - e, -1.0,  0.0,
              0.0,  0.0,      1.0, -1.0,
              0.0,  0.0,     -1.0,  2.0;
  // clang-format on
  system.B = Vector::Zero(4);
  system.B(3) = 1.0;
  system.node_order = {0, 1, 2, 3};
  return system;
}

}  // namespace consensus_lab
