#include "mcns/graph.hpp"

#include <algorithm>

#include "mcns/error.hpp"

namespace mcns {

Pag::Pag(std::size_t nodes, std::optional<std::size_t> label)
    : n_(nodes), label_(label), marks_(nodes * nodes, Mark::None) {}

void Pag::add_edge(std::size_t a, std::size_t b, Mark at_a, Mark at_b) {
  if (a == b) throw Error(ErrorCode::InvalidArgument, "pag: self edge");
  marks_[b * n_ + a] = at_a;
  marks_[a * n_ + b] = at_b;
}

void Pag::remove_edge(std::size_t a, std::size_t b) {
  marks_[a * n_ + b] = Mark::None;
  marks_[b * n_ + a] = Mark::None;
}

std::vector<std::size_t> Pag::adjacencies(std::size_t a) const {
  std::vector<std::size_t> out;
  for (std::size_t b = 0; b < n_; ++b) {
    if (b != a && adjacent(a, b)) out.push_back(b);
  }
  return out;
}

std::vector<PagEdge> Pag::edges() const {
  std::vector<PagEdge> out;
  for (std::size_t a = 0; a < n_; ++a) {
    for (std::size_t b = a + 1; b < n_; ++b) {
      if (adjacent(a, b)) out.push_back(PagEdge{a, b, mark(b, a), mark(a, b)});
    }
  }
  return out;
}

std::size_t Pag::edge_count() const {
  std::size_t c = 0;
  for (std::size_t a = 0; a < n_; ++a) {
    for (std::size_t b = a + 1; b < n_; ++b) c += adjacent(a, b) ? 1 : 0;
  }
  return c;
}

EdgeKind edge_kind(Mark at_a, Mark at_b) {
  auto kind = [](Mark x, Mark y) -> EdgeKind {
    if (x == Mark::Tail && y == Mark::Arrow) return EdgeKind::Directed;
    if (x == Mark::Arrow && y == Mark::Arrow) return EdgeKind::Bidirected;
    if (x == Mark::Circle && y == Mark::Arrow) return EdgeKind::CircleArrow;
    if (x == Mark::Circle && y == Mark::Circle) return EdgeKind::CircleCircle;
    return EdgeKind::Inadmissible;
  };
  const auto k = kind(at_a, at_b);
  return k != EdgeKind::Inadmissible ? k : kind(at_b, at_a);
}

bool admissible(const Pag& pag) {
  for (const auto& e : pag.edges()) {
    if (edge_kind(e.at_a, e.at_b) == EdgeKind::Inadmissible) return false;
  }
  return true;
}

void CausalDag::add_edge(std::size_t from, std::size_t to) {
  const DirectedEdge e{from, to};
  auto it = std::lower_bound(edges.begin(), edges.end(), e);
  if (it == edges.end() || *it != e) edges.insert(it, e);
}

bool CausalDag::has_edge(std::size_t from, std::size_t to) const {
  return std::binary_search(edges.begin(), edges.end(), DirectedEdge{from, to});
}

std::vector<std::size_t> CausalDag::parents(std::size_t v) const {
  std::vector<std::size_t> out;
  for (const auto& e : edges) {
    if (e.to == v) out.push_back(e.from);
  }
  return out;
}

bool is_acyclic(const CausalDag& dag) {
  // Kahn's algorithm.
  std::vector<std::size_t> indegree(dag.node_count, 0);
  std::vector<std::vector<std::size_t>> out(dag.node_count);
  for (const auto& e : dag.edges) {
    ++indegree[e.to];
    out[e.from].push_back(e.to);
  }
  std::vector<std::size_t> ready;
  for (std::size_t v = 0; v < dag.node_count; ++v) {
    if (indegree[v] == 0) ready.push_back(v);
  }
  std::size_t seen = 0;
  while (!ready.empty()) {
    const std::size_t v = ready.back();
    ready.pop_back();
    ++seen;
    for (std::size_t w : out[v]) {
      if (--indegree[w] == 0) ready.push_back(w);
    }
  }
  return seen == dag.node_count;
}

std::string node_name(std::size_t node, std::optional<std::size_t> label) {
  if (label && node == *label) return "label";
  return "F" + std::to_string(node);
}

}  // namespace mcns
