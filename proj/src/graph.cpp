#include "discycle/graph.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <string>

#include "discycle/errors.hpp"

namespace discycle {

VertexSet make_vertex_set(std::vector<Vertex> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

DirectedGraph::DirectedGraph(int p) : DirectedGraph(p, {}) {}

DirectedGraph::DirectedGraph(int p, std::vector<Edge> edges) : p_(p), edges_(std::move(edges)) {
  if (p < 1) throw InvalidArgument("graph needs at least one vertex, got p=" + std::to_string(p));
  for (const auto& e : edges_) {
    if (e.from < 0 || e.from >= p || e.to < 0 || e.to >= p)
      throw InvalidArgument("edge " + std::to_string(e.from + 1) + "->" + std::to_string(e.to + 1) +
                            " has a vertex outside 1.." + std::to_string(p));
    if (e.from == e.to)
      throw InvalidArgument("self-loop at vertex " + std::to_string(e.from + 1));
  }
  std::sort(edges_.begin(), edges_.end());
  if (auto dup = std::adjacent_find(edges_.begin(), edges_.end()); dup != edges_.end())
    throw InvalidArgument("duplicate edge " + std::to_string(dup->from + 1) + "->" +
                          std::to_string(dup->to + 1));
  out_.assign(p, {});
  in_.assign(p, {});
  for (const auto& e : edges_) {
    out_[e.from].push_back(e.to);
    in_[e.to].push_back(e.from);
  }
  for (auto& v : in_) std::sort(v.begin(), v.end());
}

void DirectedGraph::check_vertex(Vertex v) const {
  if (v < 0 || v >= p_)
    throw InvalidArgument("vertex " + std::to_string(v + 1) + " outside 1.." + std::to_string(p_));
}

bool DirectedGraph::has_edge(Vertex from, Vertex to) const {
  check_vertex(from);
  check_vertex(to);
  return std::binary_search(edges_.begin(), edges_.end(), Edge{from, to});
}

std::span<const Vertex> DirectedGraph::children(Vertex v) const {
  check_vertex(v);
  return out_[v];
}

std::span<const Vertex> DirectedGraph::parents(Vertex v) const {
  check_vertex(v);
  return in_[v];
}

namespace {

// Iterative Tarjan; returns the component id of each vertex (ids in reverse
// topological order, as Tarjan emits sinks first).
std::vector<int> tarjan(const DirectedGraph& g, int& count) {
  const int p = g.size();
  std::vector<int> index(p, -1), low(p, 0), comp(p, -1);
  std::vector<bool> on_stack(p, false);
  std::vector<Vertex> stack;
  int next_index = 0;
  count = 0;

  struct Frame {
    Vertex v;
    std::size_t child;
  };
  for (Vertex root = 0; root < p; ++root) {
    if (index[root] >= 0) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& f = frames.back();
      auto kids = g.children(f.v);
      if (f.child < kids.size()) {
        Vertex w = kids[f.child++];
        if (index[w] < 0) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      Vertex v = f.v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
      if (low[v] == index[v]) {
        Vertex w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = count;
        } while (w != v);
        ++count;
      }
    }
  }
  return comp;
}

}  // namespace

ComponentPartition strong_components(const DirectedGraph& g) {
  int count = 0;
  auto comp = tarjan(g, count);
  ComponentPartition parts(count);
  for (Vertex v = 0; v < g.size(); ++v) parts[comp[v]].push_back(v);

  // Kahn on the condensation, smallest leading vertex first.
  std::vector<std::vector<int>> succ(count);
  std::vector<int> indeg(count, 0);
  for (const auto& e : g.edges()) {
    int a = comp[e.from], b = comp[e.to];
    if (a != b) succ[a].push_back(b);
  }
  for (auto& s : succ) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (int b : s) ++indeg[b];
  }
  auto later = [&](int a, int b) { return parts[a].front() > parts[b].front(); };
  std::priority_queue<int, std::vector<int>, decltype(later)> ready(later);
  for (int c = 0; c < count; ++c)
    if (indeg[c] == 0) ready.push(c);
  ComponentPartition ordered;
  ordered.reserve(count);
  while (!ready.empty()) {
    int c = ready.top();
    ready.pop();
    ordered.push_back(parts[c]);
    for (int b : succ[c])
      if (--indeg[b] == 0) ready.push(b);
  }
  return ordered;
}

std::vector<int> component_index(const DirectedGraph& g, const ComponentPartition& parts) {
  std::vector<int> idx(g.size(), -1);
  for (std::size_t c = 0; c < parts.size(); ++c)
    for (Vertex v : parts[c]) idx[v] = static_cast<int>(c);
  return idx;
}

bool is_cycle_disjoint(const DirectedGraph& g) {
  auto parts = strong_components(g);
  auto idx = component_index(g, parts);
  for (const auto& comp : parts) {
    if (comp.size() < 2) continue;
    for (Vertex v : comp) {
      int in = 0, out = 0;
      for (Vertex w : g.children(v)) out += idx[w] == idx[v];
      for (Vertex w : g.parents(v)) in += idx[w] == idx[v];
      if (in != 1 || out != 1) return false;
    }
  }
  return true;
}

std::vector<std::vector<Vertex>> disjoint_cycles(const DirectedGraph& g) {
  if (!is_cycle_disjoint(g)) throw InvalidArgument("graph is not cycle-disjoint");
  auto parts = strong_components(g);
  auto idx = component_index(g, parts);
  std::vector<std::vector<Vertex>> cycles;
  for (const auto& comp : parts) {
    if (comp.size() < 2) continue;
    std::vector<Vertex> seq{comp.front()};
    while (true) {
      Vertex cur = seq.back(), next = -1;
      for (Vertex w : g.children(cur))
        if (idx[w] == idx[cur]) next = w;
      if (next == seq.front()) break;
      seq.push_back(next);
    }
    cycles.push_back(std::move(seq));
  }
  return cycles;
}

namespace {

VertexSet reach(const DirectedGraph& g, std::span<const Vertex> seeds, bool backwards,
                std::optional<Vertex> blocked) {
  std::vector<bool> seen(g.size(), false);
  std::vector<Vertex> todo;
  for (Vertex s : seeds) {
    g.check_vertex(s);
    if (blocked && s == *blocked) continue;
    if (!seen[s]) {
      seen[s] = true;
      todo.push_back(s);
    }
  }
  while (!todo.empty()) {
    Vertex v = todo.back();
    todo.pop_back();
    for (Vertex w : backwards ? g.parents(v) : g.children(v)) {
      if (seen[w] || (blocked && w == *blocked)) continue;
      seen[w] = true;
      todo.push_back(w);
    }
  }
  VertexSet out;
  for (Vertex v = 0; v < g.size(); ++v)
    if (seen[v]) out.push_back(v);
  return out;
}

bool intersects(const VertexSet& a, const VertexSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j) ++i; else ++j;
  }
  return false;
}

}  // namespace

VertexSet ancestors(const DirectedGraph& g, std::span<const Vertex> c) {
  return reach(g, c, true, std::nullopt);
}

VertexSet descendants(const DirectedGraph& g, std::span<const Vertex> c) {
  return reach(g, c, false, std::nullopt);
}

VertexSet reaching_avoiding(const DirectedGraph& g, Vertex target, std::optional<Vertex> blocked) {
  Vertex t[] = {target};
  return reach(g, t, true, blocked);
}

bool d2_zero_predicate(const DirectedGraph& g, Vertex u, Vertex v) {
  g.check_vertex(u);
  g.check_vertex(v);
  if (u == v) throw InvalidArgument("d2 predicate needs distinct vertices");
  Vertex us[] = {u};
  auto anc_u = ancestors(g, us);
  if (std::binary_search(anc_u.begin(), anc_u.end(), v)) return false;
  // Tops that reach v while avoiding u give a trek whose v-side misses u.
  auto reach_v = reaching_avoiding(g, v, u);
  return !intersects(anc_u, reach_v);
}

bool d3_zero_predicate(const DirectedGraph& g, Vertex u, Vertex v) {
  g.check_vertex(u);
  g.check_vertex(v);
  if (u == v) throw InvalidArgument("d3 predicate needs distinct vertices");
  auto to_u = reaching_avoiding(g, u, v);
  auto to_v = reaching_avoiding(g, v, u);
  return !intersects(to_u, to_v);
}

std::optional<std::vector<std::vector<Vertex>>> simple_cycles(const DirectedGraph& g,
                                                              std::size_t limit) {
  const int p = g.size();
  std::vector<std::vector<Vertex>> cycles;
  std::vector<bool> blocked(p, false);
  std::vector<std::vector<Vertex>> block_map(p);
  std::vector<Vertex> path;
  bool overflow = false;

  std::function<void(Vertex)> unblock = [&](Vertex v) {
    blocked[v] = false;
    auto pending = std::move(block_map[v]);
    block_map[v].clear();
    for (Vertex w : pending)
      if (blocked[w]) unblock(w);
  };

  for (Vertex start = 0; start < p && !overflow; ++start) {
    std::fill(blocked.begin(), blocked.end(), false);
    for (auto& b : block_map) b.clear();
    std::function<bool(Vertex)> circuit = [&](Vertex v) -> bool {
      bool found = false;
      path.push_back(v);
      blocked[v] = true;
      for (Vertex w : g.children(v)) {
        if (overflow) break;
        if (w < start) continue;
        if (w == start) {
          cycles.push_back(path);
          if (cycles.size() > limit) overflow = true;
          found = true;
        } else if (!blocked[w] && circuit(w)) {
          found = true;
        }
      }
      if (found) {
        unblock(v);
      } else {
        for (Vertex w : g.children(v)) {
          if (w < start) continue;
          auto& bm = block_map[w];
          if (std::find(bm.begin(), bm.end(), v) == bm.end()) bm.push_back(v);
        }
      }
      path.pop_back();
      return found;
    };
    circuit(start);
  }
  if (overflow) return std::nullopt;
  return cycles;
}

}  // namespace discycle
