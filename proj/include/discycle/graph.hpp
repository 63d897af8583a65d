#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace discycle {

// Vertices are 0-based internally; interchange formats shift to 1-based.
using Vertex = int;
using VertexSet = std::vector<Vertex>;  // kept sorted and duplicate-free

struct Edge {
  Vertex from;
  Vertex to;
  auto operator<=>(const Edge&) const = default;
};

/// Immutable directed graph on vertices 0..p-1 without self-loops or
/// duplicate edges.
class DirectedGraph {
 public:
  DirectedGraph() = default;
  explicit DirectedGraph(int p);
  DirectedGraph(int p, std::vector<Edge> edges);

  int size() const noexcept { return p_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  bool has_edge(Vertex from, Vertex to) const;
  std::span<const Vertex> children(Vertex v) const;
  std::span<const Vertex> parents(Vertex v) const;

  // Throws InvalidArgument when v is not a vertex of this graph.
  void check_vertex(Vertex v) const;

  bool operator==(const DirectedGraph& other) const {
    return p_ == other.p_ && edges_ == other.edges_;
  }
  auto operator<=>(const DirectedGraph& other) const {
    if (auto c = p_ <=> other.p_; c != 0) return c;
    return edges_ <=> other.edges_;
  }

 private:
  int p_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<Vertex>> out_;
  std::vector<std::vector<Vertex>> in_;
};

// Strong components listed in a topological order of the condensation.
// Among components with no ordering constraint the one holding the smallest
// vertex comes first, so the output is canonical.
using ComponentPartition = std::vector<VertexSet>;

ComponentPartition strong_components(const DirectedGraph& g);

// Component index of every vertex, consistent with strong_components(g).
std::vector<int> component_index(const DirectedGraph& g, const ComponentPartition& parts);

bool is_cycle_disjoint(const DirectedGraph& g);

// Directed cycles of a cycle-disjoint graph, each given as the vertex
// sequence starting at its smallest vertex and following the edges.
std::vector<std::vector<Vertex>> disjoint_cycles(const DirectedGraph& g);

// anc(c): vertices with a directed path (length >= 0) into c.
VertexSet ancestors(const DirectedGraph& g, std::span<const Vertex> c);
VertexSet descendants(const DirectedGraph& g, std::span<const Vertex> c);

// Vertices that reach `target` without passing through `blocked`.
VertexSet reaching_avoiding(const DirectedGraph& g, Vertex target, std::optional<Vertex> blocked);

/// True iff d2(u, v) = s_uu t_uuv - s_uv t_uuu vanishes for every parameter
/// choice, i.e. ({}, {u}) t-separates u from v: v is not an ancestor of u and
/// every common ancestor reaches v only through u.
bool d2_zero_predicate(const DirectedGraph& g, Vertex u, Vertex v);

/// True iff there is no simple 2-trek between u and v with both sides
/// non-empty, i.e. ({v}, {u}) t-separates u from v.
bool d3_zero_predicate(const DirectedGraph& g, Vertex u, Vertex v);

// Elementary directed cycles (Johnson). Each cycle starts at its smallest
// vertex. Stops and returns std::nullopt once more than `limit` are found.
std::optional<std::vector<std::vector<Vertex>>> simple_cycles(const DirectedGraph& g,
                                                              std::size_t limit);

VertexSet make_vertex_set(std::vector<Vertex> v);

}  // namespace discycle
