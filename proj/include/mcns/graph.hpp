#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mcns {

enum class Mark : std::uint8_t { None, Tail, Arrow, Circle };

// The four edge kinds a PAG may carry, read from the lower-indexed endpoint:
// a -> b, a <-> b, a o-> b, a o-o b (and their mirrors).
enum class EdgeKind { Directed, Bidirected, CircleArrow, CircleCircle, Inadmissible };

struct PagEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  Mark at_a = Mark::None;
  Mark at_b = Mark::None;
  bool operator==(const PagEdge&) const = default;
};

// Mixed graph with endpoint marks. mark(a, b) is the mark at b on the a-b edge.
class Pag {
 public:
  Pag() = default;
  explicit Pag(std::size_t nodes, std::optional<std::size_t> label = std::nullopt);

  std::size_t size() const noexcept { return n_; }
  std::optional<std::size_t> label() const noexcept { return label_; }

  bool adjacent(std::size_t a, std::size_t b) const { return marks_[a * n_ + b] != Mark::None; }
  Mark mark(std::size_t a, std::size_t b) const { return marks_[a * n_ + b]; }
  void set_mark(std::size_t a, std::size_t b, Mark m) { marks_[a * n_ + b] = m; }

  void add_edge(std::size_t a, std::size_t b, Mark at_a, Mark at_b);
  void remove_edge(std::size_t a, std::size_t b);

  std::vector<std::size_t> adjacencies(std::size_t a) const;
  std::vector<PagEdge> edges() const;  // a < b
  std::size_t edge_count() const;

  // a -> b: tail at a, arrow at b.
  bool is_parent(std::size_t a, std::size_t b) const {
    return mark(b, a) == Mark::Tail && mark(a, b) == Mark::Arrow;
  }

  bool operator==(const Pag&) const = default;

 private:
  std::size_t n_ = 0;
  std::optional<std::size_t> label_;
  std::vector<Mark> marks_;
};

EdgeKind edge_kind(Mark at_a, Mark at_b);
bool admissible(const Pag& pag);

struct DirectedEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  auto operator<=>(const DirectedEdge&) const = default;
};

struct CausalDag {
  std::size_t node_count = 0;
  std::optional<std::size_t> label;
  std::vector<DirectedEdge> edges;  // sorted, unique

  void add_edge(std::size_t from, std::size_t to);
  bool has_edge(std::size_t from, std::size_t to) const;
  std::vector<std::size_t> parents(std::size_t v) const;
  bool operator==(const CausalDag&) const = default;
};

bool is_acyclic(const CausalDag& dag);

// "F<id>" for factor nodes, "label" for the label node.
std::string node_name(std::size_t node, std::optional<std::size_t> label);

}  // namespace mcns
