#pragma once

// Min-cost flow with arc demands (lower bounds), residual graphs and
// forced-arc marginal cost queries.

#include <cstdint>
#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "softcp/domain.hpp"

namespace softcp::flow {

using VertexId = int;
using ArcId = int;
using Amount = std::int64_t;

// Capacity sentinel. Every finite capacity used by the constraint networks is
// bounded by the number of variables, far below this value.
inline constexpr Amount kInfinite = std::numeric_limits<Amount>::max() / 4;
inline constexpr Cost kUnreachable = std::numeric_limits<Cost>::max() / 4;

struct Arc {
  VertexId tail;
  VertexId head;
  Amount demand;
  Amount capacity;
  Cost cost;
};

class FlowNetwork {
 public:
  FlowNetwork(int num_vertices, VertexId source, VertexId sink)
      : num_vertices_(num_vertices), source_(source), sink_(sink) {
    if (num_vertices < 2) throw std::invalid_argument("flow network needs at least 2 vertices");
    check_vertex(source);
    check_vertex(sink);
    if (source == sink) throw std::invalid_argument("source and sink must differ");
  }

  ArcId add_arc(VertexId tail, VertexId head, Amount demand, Amount capacity, Cost cost) {
    check_vertex(tail);
    check_vertex(head);
    if (demand < 0 || capacity < 0 || cost < 0)
      throw std::invalid_argument("arc demand, capacity and cost must be nonnegative");
    if (demand > capacity) throw std::invalid_argument("arc demand exceeds capacity");
    arcs_.push_back({tail, head, demand, capacity, cost});
    return static_cast<ArcId>(arcs_.size() - 1);
  }

  [[nodiscard]] int num_vertices() const { return num_vertices_; }
  [[nodiscard]] int num_arcs() const { return static_cast<int>(arcs_.size()); }
  [[nodiscard]] VertexId source() const { return source_; }
  [[nodiscard]] VertexId sink() const { return sink_; }
  [[nodiscard]] const Arc& arc(ArcId a) const { return arcs_.at(a); }
  [[nodiscard]] const std::vector<Arc>& arcs() const { return arcs_; }

 private:
  void check_vertex(VertexId v) const {
    if (v < 0 || v >= num_vertices_) throw std::invalid_argument("vertex id out of range");
  }

  int num_vertices_;
  VertexId source_;
  VertexId sink_;
  std::vector<Arc> arcs_;
};

struct Flow {
  std::vector<Amount> arc_flow;  // indexed by ArcId
  Amount value = 0;
  Cost cost = 0;

  Amount operator[](ArcId a) const { return arc_flow.at(a); }
};

// kFixed: the flow value is prescribed and the residual graph follows the
// textbook definition. kFree: the value is left open, which is modelled by an
// implicit zero-cost return arc (sink -> source) of unbounded capacity.
enum class ValueMode { kFixed, kFree };

namespace detail {

// Successive shortest paths with Dijkstra on reduced costs. All costs must be
// nonnegative so zero potentials are valid initially.
class SspSolver {
 public:
  explicit SspSolver(int n) : adj_(n), pot_(n, 0) {}

  int add_edge(int from, int to, Amount cap, Cost cost) {
    int id = static_cast<int>(edges_.size());
    edges_.push_back({to, cap, cost});
    edges_.push_back({from, 0, -cost});
    adj_[from].push_back(id);
    adj_[to].push_back(id + 1);
    return id;
  }

  Amount flow_on(int edge) const { return edges_[edge ^ 1].cap; }

  // Sends up to `limit` units from s to t at minimum cost; returns units sent.
  Amount run(int s, int t, Amount limit) {
    const int n = static_cast<int>(adj_.size());
    std::vector<Cost> dist(n);
    std::vector<int> via(n);
    Amount sent = 0;
    while (sent < limit) {
      std::fill(dist.begin(), dist.end(), kUnreachable);
      std::fill(via.begin(), via.end(), -1);
      using Item = std::pair<Cost, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
      dist[s] = 0;
      heap.emplace(0, s);
      while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d != dist[u]) continue;
        for (int e : adj_[u]) {
          const Edge& edge = edges_[e];
          if (edge.cap == 0) continue;
          Cost nd = d + edge.cost + pot_[u] - pot_[edge.to];
          if (nd < dist[edge.to]) {
            dist[edge.to] = nd;
            via[edge.to] = e;
            heap.emplace(nd, edge.to);
          }
        }
      }
      if (dist[t] == kUnreachable) break;
      Cost reached_max = 0;
      for (Cost d : dist)
        if (d != kUnreachable) reached_max = std::max(reached_max, d);
      for (int v = 0; v < n; ++v) pot_[v] += dist[v] == kUnreachable ? reached_max : dist[v];

      Amount push = limit - sent;
      for (int v = t; v != s; v = edges_[via[v] ^ 1].to) push = std::min(push, edges_[via[v]].cap);
      for (int v = t; v != s; v = edges_[via[v] ^ 1].to) {
        int e = via[v];
        if (edges_[e].cap < kInfinite) edges_[e].cap -= push;
        edges_[e ^ 1].cap += push;
      }
      sent += push;
    }
    return sent;
  }

 private:
  struct Edge {
    int to;
    Amount cap;
    Cost cost;
  };
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;
  std::vector<Cost> pot_;
};

inline std::optional<Flow> solve(const FlowNetwork& net, std::optional<Amount> required_value) {
  const int n = net.num_vertices();
  const int super_source = n;
  const int super_sink = n + 1;
  SspSolver solver(n + 2);
  std::vector<Amount> excess(n, 0);
  std::vector<int> edge_of(net.num_arcs(), -1);

  for (ArcId a = 0; a < net.num_arcs(); ++a) {
    const Arc& arc = net.arc(a);
    Amount residual_cap = arc.capacity >= kInfinite ? kInfinite : arc.capacity - arc.demand;
    edge_of[a] = solver.add_edge(arc.tail, arc.head, residual_cap, arc.cost);
    excess[arc.head] += arc.demand;
    excess[arc.tail] -= arc.demand;
  }

  // Return arc closing the s-t flow into a circulation.
  if (required_value) {
    if (*required_value < 0) throw std::invalid_argument("required flow value must be nonnegative");
    excess[net.source()] += *required_value;
    excess[net.sink()] -= *required_value;
  } else {
    solver.add_edge(net.sink(), net.source(), kInfinite, 0);
  }

  Amount total = 0;
  for (VertexId v = 0; v < n; ++v) {
    if (excess[v] > 0) {
      solver.add_edge(super_source, v, excess[v], 0);
      total += excess[v];
    } else if (excess[v] < 0) {
      solver.add_edge(v, super_sink, -excess[v], 0);
    }
  }

  if (solver.run(super_source, super_sink, total) < total) return std::nullopt;

  Flow flow;
  flow.arc_flow.resize(net.num_arcs());
  for (ArcId a = 0; a < net.num_arcs(); ++a) {
    flow.arc_flow[a] = solver.flow_on(edge_of[a]) + net.arc(a).demand;
    flow.cost += flow.arc_flow[a] * net.arc(a).cost;
  }
  for (ArcId a = 0; a < net.num_arcs(); ++a) {
    const Arc& arc = net.arc(a);
    if (arc.tail == net.source()) flow.value += flow.arc_flow[a];
    if (arc.head == net.source()) flow.value -= flow.arc_flow[a];
  }
  return flow;
}

}  // namespace detail

// Minimum-cost integral flow of exactly `required_value` units from source to
// sink that meets every arc demand. nullopt when no such flow exists.
inline std::optional<Flow> feasible_min_cost_flow(const FlowNetwork& net, Amount required_value) {
  return detail::solve(net, required_value);
}

// Minimum-cost feasible flow of any value.
inline std::optional<Flow> min_cost_feasible_flow(const FlowNetwork& net) {
  return detail::solve(net, std::nullopt);
}

struct ResidualArc {
  VertexId tail;
  VertexId head;
  Amount residual;
  Cost cost;
  ArcId arc;     // originating network arc, -1 for the implicit return arc
  bool reverse;  // true for a^{-1}
};

class ResidualGraph {
 public:
  ResidualGraph(int num_vertices, std::vector<ResidualArc> arcs)
      : num_vertices_(num_vertices), arcs_(std::move(arcs)), out_(num_vertices) {
    for (int i = 0; i < static_cast<int>(arcs_.size()); ++i) out_[arcs_[i].tail].push_back(i);
    compute_potentials();
  }

  [[nodiscard]] int num_vertices() const { return num_vertices_; }
  [[nodiscard]] const std::vector<ResidualArc>& arcs() const { return arcs_; }
  [[nodiscard]] const std::vector<int>& out_arcs(VertexId v) const { return out_[v]; }
  [[nodiscard]] bool has_negative_cycle() const { return negative_cycle_; }
  [[nodiscard]] const std::vector<Cost>& potentials() const { return potential_; }

 private:
  // Label-correcting sweep from a virtual root joined to every vertex at cost
  // zero. Yields potentials with nonnegative reduced costs, or detects a
  // negative circuit.
  void compute_potentials() {
    potential_.assign(num_vertices_, 0);
    for (int round = 0; round <= num_vertices_; ++round) {
      bool changed = false;
      for (const auto& a : arcs_) {
        if (potential_[a.tail] + a.cost < potential_[a.head]) {
          potential_[a.head] = potential_[a.tail] + a.cost;
          changed = true;
        }
      }
      if (!changed) return;
    }
    negative_cycle_ = true;
  }

  int num_vertices_;
  std::vector<ResidualArc> arcs_;
  std::vector<std::vector<int>> out_;
  std::vector<Cost> potential_;
  bool negative_cycle_ = false;
};

// A^f = {a : f(a) < c(a)} u {a^{-1} : f(a) > d(a)}, with w(a^{-1}) = -w(a).
inline ResidualGraph residual(const FlowNetwork& net, const Flow& flow,
                              ValueMode mode = ValueMode::kFixed) {
  std::vector<ResidualArc> arcs;
  arcs.reserve(2 * net.num_arcs() + 2);
  for (ArcId a = 0; a < net.num_arcs(); ++a) {
    const Arc& arc = net.arc(a);
    Amount f = flow[a];
    if (f < arc.capacity) {
      Amount slack = arc.capacity >= kInfinite ? kInfinite : arc.capacity - f;
      arcs.push_back({arc.tail, arc.head, slack, arc.cost, a, false});
    }
    if (f > arc.demand) arcs.push_back({arc.head, arc.tail, f - arc.demand, -arc.cost, a, true});
  }
  if (mode == ValueMode::kFree) {
    arcs.push_back({net.sink(), net.source(), kInfinite, 0, -1, false});
    if (flow.value > 0) arcs.push_back({net.source(), net.sink(), flow.value, 0, -1, true});
  }
  return ResidualGraph(net.num_vertices(), std::move(arcs));
}

struct ShortestPathTree {
  std::vector<Cost> dist;       // kUnreachable when not reached
  std::vector<int> parent_arc;  // residual arc index, -1 at the root
};

// Single-source shortest paths on the residual graph. Negative reverse-arc
// costs are handled through the graph's potentials.
inline ShortestPathTree shortest_residual_tree(const ResidualGraph& res, VertexId from) {
  if (res.has_negative_cycle())
    throw std::invalid_argument("residual graph has a negative circuit; flow is not of minimum cost");
  const auto& pot = res.potentials();
  const int n = res.num_vertices();
  std::vector<Cost> reduced(n, kUnreachable);
  ShortestPathTree tree{std::vector<Cost>(n, kUnreachable), std::vector<int>(n, -1)};
  using Item = std::pair<Cost, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  reduced[from] = 0;
  heap.emplace(0, from);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d != reduced[u]) continue;
    for (int i : res.out_arcs(u)) {
      const ResidualArc& a = res.arcs()[i];
      Cost nd = d + a.cost + pot[u] - pot[a.head];
      if (nd < reduced[a.head]) {
        reduced[a.head] = nd;
        tree.parent_arc[a.head] = i;
        heap.emplace(nd, a.head);
      }
    }
  }
  for (VertexId v = 0; v < n; ++v)
    if (reduced[v] != kUnreachable) tree.dist[v] = reduced[v] - pot[from] + pot[v];
  return tree;
}

struct ResidualPath {
  Cost cost = 0;
  std::vector<int> arcs;  // indices into ResidualGraph::arcs(), in order
};

inline std::optional<ResidualPath> shortest_residual_path(const ResidualGraph& res, VertexId from,
                                                          VertexId to) {
  if (from == to) return ResidualPath{};
  ShortestPathTree tree = shortest_residual_tree(res, from);
  if (tree.dist[to] == kUnreachable) return std::nullopt;
  ResidualPath path;
  path.cost = tree.dist[to];
  for (VertexId v = to; v != from; v = res.arcs()[tree.parent_arc[v]].tail)
    path.arcs.push_back(tree.parent_arc[v]);
  std::reverse(path.arcs.begin(), path.arcs.end());
  return path;
}

// Minimum cost of a flow of the same value that sends at least one unit
// through `arc`, given a min-cost flow and its residual graph.
inline std::optional<Cost> forced_arc_cost(const FlowNetwork& net, const Flow& flow,
                                           const ResidualGraph& res, ArcId arc) {
  const Arc& a = net.arc(arc);
  if (flow[arc] > 0) return flow.cost;
  if (a.capacity == 0) return std::nullopt;
  auto path = shortest_residual_path(res, a.head, a.tail);
  if (!path) return std::nullopt;
  return flow.cost + path->cost + a.cost;
}

inline std::optional<Cost> forced_arc_cost(const FlowNetwork& net, const Flow& flow, ArcId arc,
                                           ValueMode mode = ValueMode::kFixed) {
  return forced_arc_cost(net, flow, residual(net, flow, mode), arc);
}

}  // namespace softcp::flow
