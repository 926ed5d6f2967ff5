#include "sinv/flow.hpp"

#include <algorithm>

#include "sinv/error.hpp"

namespace sinv {

namespace detail {

// Residual network with paired arcs (k, k ^ 1). Max flow by Dinic: BFS
// level graph, then blocking flow with an iterative DFS. With unit
// capacities every augmenting path carries exactly one unit.
struct UnitFlowNetwork {
  std::int32_t n = 0;
  std::int32_t source = 0;
  std::int32_t sink = 0;
  std::vector<std::int32_t> to;
  std::vector<std::int32_t> cap;
  std::vector<std::int32_t> base_cap;
  std::vector<std::size_t> offsets;  // CSR over arc ids
  std::vector<std::size_t> adj;
  std::vector<std::int32_t> level;
  std::vector<std::size_t> cursor;
  std::vector<std::int32_t> queue;
  std::vector<std::size_t> stack;

  explicit UnitFlowNetwork(const FlowGraph& fg) {
    n = static_cast<std::int32_t>(fg.node_count());
    source = fg.source();
    sink = fg.sink();
    to.reserve(2 * fg.arcs.size());
    base_cap.reserve(2 * fg.arcs.size());
    std::vector<std::size_t> deg(static_cast<std::size_t>(n) + 1, 0);
    for (const FlowArc& a : fg.arcs) {
      to.push_back(a.to);
      base_cap.push_back(a.capacity);
      to.push_back(a.from);
      base_cap.push_back(0);
      ++deg[a.from + 1];
      ++deg[a.to + 1];
    }
    offsets.assign(static_cast<std::size_t>(n) + 1, 0);
    for (std::int32_t v = 0; v < n; ++v) offsets[v + 1] = offsets[v] + deg[v + 1];
    adj.resize(to.size());
    std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
    for (std::size_t k = 0; k < to.size(); ++k) {
      std::int32_t from = to[k ^ 1];
      adj[fill[from]++] = k;
    }
    cap = base_cap;
    level.resize(static_cast<std::size_t>(n));
    cursor.resize(static_cast<std::size_t>(n));
    queue.reserve(static_cast<std::size_t>(n));
  }

  void reset() { cap = base_cap; }

  bool build_levels() {
    std::fill(level.begin(), level.end(), -1);
    queue.clear();
    level[source] = 0;
    queue.push_back(source);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      std::int32_t v = queue[head];
      for (std::size_t p = offsets[v]; p < offsets[v + 1]; ++p) {
        std::size_t k = adj[p];
        if (cap[k] > 0 && level[to[k]] < 0) {
          level[to[k]] = level[v] + 1;
          queue.push_back(to[k]);
        }
      }
    }
    return level[sink] >= 0;
  }

  std::size_t blocking_flow() {
    std::size_t pushed = 0;
    std::copy(offsets.begin(), offsets.end() - 1, cursor.begin());
    stack.clear();
    std::int32_t v = source;
    while (true) {
      if (v == sink) {
        for (std::size_t k : stack) {
          --cap[k];
          ++cap[k ^ 1];
        }
        ++pushed;
        stack.clear();
        v = source;
        continue;
      }
      bool advanced = false;
      for (std::size_t& p = cursor[v]; p < offsets[v + 1]; ++p) {
        std::size_t k = adj[p];
        if (cap[k] > 0 && level[to[k]] == level[v] + 1) {
          stack.push_back(k);
          v = to[k];
          advanced = true;
          break;
        }
      }
      if (advanced) continue;
      // Dead end: prune v from the level graph and retreat.
      level[v] = -1;
      if (stack.empty()) break;
      std::size_t k = stack.back();
      stack.pop_back();
      v = to[k ^ 1];
      ++cursor[v];
    }
    return pushed;
  }

  std::size_t run() {
    std::size_t flow = 0;
    while (build_levels()) flow += blocking_flow();
    return flow;
  }
};

}  // namespace detail

FlowGraph split_transform(const DirectedGraph& g, const IOConfig& io) {
  validate(io, g);
  FlowGraph fg;
  fg.n_original = g.n_nodes();
  fg.arcs.reserve(g.n_nodes() + g.n_edges() + io.n_inputs() + io.n_sensors());
  for (std::size_t v = 0; v < g.n_nodes(); ++v) {
    auto id = static_cast<NodeId>(v);
    fg.arcs.push_back({FlowGraph::in_copy(id), FlowGraph::out_copy(id), 1});
  }
  for (const Edge& e : g.edges()) {
    if (e.source == e.target) continue;
    fg.arcs.push_back({FlowGraph::out_copy(e.source), FlowGraph::in_copy(e.target), 1});
  }
  for (NodeId s : io.inputs) fg.arcs.push_back({fg.source(), FlowGraph::in_copy(s), 1});
  for (NodeId z : io.sensors) fg.arcs.push_back({FlowGraph::out_copy(z), fg.sink(), 1});
  return fg;
}

std::size_t max_flow(const FlowGraph& fg) {
  detail::UnitFlowNetwork net(fg);
  return net.run();
}

std::size_t max_disjoint_paths(const DirectedGraph& g, const IOConfig& io) {
  return max_flow(split_transform(g, io));
}

bool is_structurally_invertible(const DirectedGraph& g, const IOConfig& io) {
  if (io.n_sensors() < io.n_inputs()) {
    validate(io, g);
    return false;
  }
  return max_disjoint_paths(g, io) == io.n_inputs();
}

std::vector<std::vector<NodeId>> disjoint_path_family(const DirectedGraph& g, const IOConfig& io) {
  FlowGraph fg = split_transform(g, io);
  detail::UnitFlowNetwork net(fg);
  net.run();

  // Saturated forward arcs carry the flow. Every original node has at most
  // one unit through its internal arc, so following them never branches.
  std::vector<std::int32_t> next(fg.node_count(), -1);
  for (std::size_t a = 0; a < fg.arcs.size(); ++a) {
    const std::size_t k = 2 * a;
    if (net.base_cap[k] > 0 && net.cap[k] == 0 && fg.arcs[a].from != fg.source()) {
      next[fg.arcs[a].from] = fg.arcs[a].to;
    }
  }

  std::vector<std::vector<NodeId>> paths;
  for (NodeId s : io.inputs) {
    std::int32_t v = FlowGraph::in_copy(s);
    if (next[v] < 0) continue;
    std::vector<NodeId> path;
    while (v != fg.sink()) {
      if (v % 2 == 0) path.push_back(v / 2);
      v = next[v];
    }
    paths.push_back(std::move(path));
  }
  return paths;
}

SensorSubsetFlow::SensorSubsetFlow(const DirectedGraph& g, std::vector<NodeId> inputs,
                                   std::vector<NodeId> candidates)
    : candidates_(std::move(candidates)) {
  IOConfig io{std::move(inputs), candidates_};
  FlowGraph fg = split_transform(g, io);
  // Sink arcs are the trailing P arcs of the split graph.
  const std::size_t first_sink_arc = fg.arcs.size() - candidates_.size();
  sink_arc_.resize(candidates_.size());
  for (std::size_t k = 0; k < candidates_.size(); ++k) sink_arc_[k] = 2 * (first_sink_arc + k);
  net_ = std::make_unique<detail::UnitFlowNetwork>(fg);
}

SensorSubsetFlow::~SensorSubsetFlow() = default;
SensorSubsetFlow::SensorSubsetFlow(SensorSubsetFlow&&) noexcept = default;
SensorSubsetFlow& SensorSubsetFlow::operator=(SensorSubsetFlow&&) noexcept = default;

std::size_t SensorSubsetFlow::disjoint_paths(std::span<const char> active) {
  if (active.size() != candidates_.size()) {
    throw Error(ErrorCode::InvalidArgument, "active mask size does not match candidate count");
  }
  for (std::size_t k = 0; k < candidates_.size(); ++k) {
    net_->base_cap[sink_arc_[k]] = active[k] ? 1 : 0;
  }
  net_->reset();
  return net_->run();
}

}  // namespace sinv
