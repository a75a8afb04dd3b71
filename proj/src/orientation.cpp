// Orientation rules for partial ancestral graphs, assuming no selection bias:
// R1-R4 and R8-R10. R5-R7 only fire on undirected (tail-tail) structure, which
// cannot arise here.

#include <algorithm>
#include <deque>
#include <vector>

#include "mcns/causal_graph.hpp"

namespace mcns {

namespace {

constexpr std::size_t kPathSearchBudget = 200000;

bool potentially_directed(const Pag& g, std::size_t from, std::size_t to) {
  return g.adjacent(from, to) && g.mark(to, from) != Mark::Arrow && g.mark(from, to) != Mark::Tail;
}

bool circle_arrow(const Pag& g, std::size_t a, std::size_t c) {
  return g.adjacent(a, c) && g.mark(c, a) == Mark::Circle && g.mark(a, c) == Mark::Arrow;
}

class PathSearch {
 public:
  explicit PathSearch(const Pag& g) : g_(g), visited_(g.size(), false) {}

  // Is there an uncovered potentially directed path prev, cur, ..., target?
  bool uncovered_pd(std::size_t prev, std::size_t cur, std::size_t target) {
    std::fill(visited_.begin(), visited_.end(), false);
    visited_[prev] = true;
    visited_[cur] = true;
    budget_ = kPathSearchBudget;
    return extend(prev, cur, target);
  }

 private:
  bool extend(std::size_t prev, std::size_t cur, std::size_t target) {
    if (budget_ == 0) return false;
    --budget_;
    for (std::size_t next = 0; next < g_.size(); ++next) {
      if (visited_[next] || !potentially_directed(g_, cur, next)) continue;
      if (g_.adjacent(prev, next)) continue;
      if (next == target) return true;
      visited_[next] = true;
      if (extend(cur, next, target)) return true;
      visited_[next] = false;
    }
    return false;
  }

  const Pag& g_;
  std::vector<bool> visited_;
  std::size_t budget_ = 0;
};

bool rule1(Pag& g) {
  bool changed = false;
  for (std::size_t b = 0; b < g.size(); ++b) {
    for (std::size_t a : g.adjacencies(b)) {
      if (g.mark(a, b) != Mark::Arrow) continue;
      for (std::size_t c : g.adjacencies(b)) {
        if (c == a || g.adjacent(a, c) || g.mark(c, b) != Mark::Circle) continue;
        g.set_mark(c, b, Mark::Tail);
        g.set_mark(b, c, Mark::Arrow);
        changed = true;
      }
    }
  }
  return changed;
}

bool rule2(Pag& g) {
  bool changed = false;
  for (std::size_t a = 0; a < g.size(); ++a) {
    for (std::size_t c : g.adjacencies(a)) {
      if (g.mark(a, c) != Mark::Circle) continue;
      for (std::size_t b : g.adjacencies(a)) {
        if (b == c || !g.adjacent(b, c)) continue;
        const bool via1 = g.is_parent(a, b) && g.mark(b, c) == Mark::Arrow;
        const bool via2 = g.mark(a, b) == Mark::Arrow && g.is_parent(b, c);
        if (via1 || via2) {
          g.set_mark(a, c, Mark::Arrow);
          changed = true;
          break;
        }
      }
    }
  }
  return changed;
}

bool rule3(Pag& g) {
  bool changed = false;
  for (std::size_t beta = 0; beta < g.size(); ++beta) {
    const auto adj = g.adjacencies(beta);
    for (std::size_t theta : adj) {
      if (g.mark(theta, beta) != Mark::Circle) continue;
      bool fire = false;
      for (std::size_t ai = 0; ai < adj.size() && !fire; ++ai) {
        const std::size_t alpha = adj[ai];
        if (alpha == theta || g.mark(alpha, beta) != Mark::Arrow) continue;
        for (std::size_t gi = ai + 1; gi < adj.size() && !fire; ++gi) {
          const std::size_t gamma = adj[gi];
          if (gamma == theta || g.mark(gamma, beta) != Mark::Arrow) continue;
          if (g.adjacent(alpha, gamma)) continue;
          if (!g.adjacent(alpha, theta) || !g.adjacent(gamma, theta)) continue;
          if (g.mark(alpha, theta) == Mark::Circle && g.mark(gamma, theta) == Mark::Circle) fire = true;
        }
      }
      if (fire) {
        g.set_mark(theta, beta, Mark::Arrow);
        changed = true;
      }
    }
  }
  return changed;
}

const std::vector<std::size_t>* find_sepset(const SepsetMap& sepsets, std::size_t x, std::size_t y) {
  auto it = sepsets.find({std::min(x, y), std::max(x, y)});
  return it == sepsets.end() ? nullptr : &it->second;
}

// Discriminating path search for (a, b, c) where a *-> b, b o-* c and a -> c.
bool discriminating_path(Pag& g, const SepsetMap& sepsets, std::size_t a, std::size_t b,
                         std::size_t c) {
  std::vector<bool> visited(g.size(), false);
  std::vector<std::size_t> previous(g.size(), b);
  std::deque<std::size_t> queue{a};
  visited[a] = true;
  visited[b] = true;
  visited[c] = true;
  while (!queue.empty()) {
    const std::size_t t = queue.front();
    queue.pop_front();
    for (std::size_t d : g.adjacencies(t)) {
      if (visited[d]) continue;
      // t must be a collider between d and its predecessor on the path.
      if (g.mark(d, t) != Mark::Arrow || g.mark(previous[t], t) != Mark::Arrow) continue;
      previous[d] = t;
      if (!g.adjacent(d, c)) {
        const auto* sep = find_sepset(sepsets, d, c);
        if (!sep) return false;
        if (std::find(sep->begin(), sep->end(), b) != sep->end()) {
          g.set_mark(c, b, Mark::Tail);
          g.set_mark(b, c, Mark::Arrow);
        } else {
          g.set_mark(a, b, Mark::Arrow);
          g.set_mark(b, a, Mark::Arrow);
          g.set_mark(c, b, Mark::Arrow);
          g.set_mark(b, c, Mark::Arrow);
        }
        return true;
      }
      if (g.is_parent(d, c)) {
        visited[d] = true;
        queue.push_back(d);
      }
    }
  }
  return false;
}

bool rule4(Pag& g, const SepsetMap& sepsets) {
  bool changed = false;
  for (std::size_t b = 0; b < g.size(); ++b) {
    for (std::size_t a : g.adjacencies(b)) {
      if (g.mark(a, b) != Mark::Arrow || g.mark(b, a) != Mark::Arrow) continue;
      for (std::size_t c : g.adjacencies(b)) {
        if (c == a || g.mark(c, b) != Mark::Circle || !g.is_parent(a, c)) continue;
        if (discriminating_path(g, sepsets, a, b, c)) changed = true;
      }
    }
  }
  return changed;
}

bool rule8(Pag& g) {
  bool changed = false;
  for (std::size_t a = 0; a < g.size(); ++a) {
    for (std::size_t c : g.adjacencies(a)) {
      if (!circle_arrow(g, a, c)) continue;
      for (std::size_t b : g.adjacencies(a)) {
        if (b == c || !g.adjacent(b, c)) continue;
        const bool a_to_b = g.mark(b, a) == Mark::Tail &&
                            (g.mark(a, b) == Mark::Arrow || g.mark(a, b) == Mark::Circle);
        if (a_to_b && g.is_parent(b, c)) {
          g.set_mark(c, a, Mark::Tail);
          changed = true;
          break;
        }
      }
    }
  }
  return changed;
}

bool rule9(Pag& g) {
  bool changed = false;
  PathSearch search(g);
  for (std::size_t a = 0; a < g.size(); ++a) {
    for (std::size_t c : g.adjacencies(a)) {
      if (!circle_arrow(g, a, c)) continue;
      for (std::size_t b : g.adjacencies(a)) {
        if (b == c || g.adjacent(b, c) || !potentially_directed(g, a, b)) continue;
        if (search.uncovered_pd(a, b, c)) {
          g.set_mark(c, a, Mark::Tail);
          changed = true;
          break;
        }
      }
    }
  }
  return changed;
}

// Vertices mu adjacent to a that start an uncovered p.d. path a, mu, ..., target.
std::vector<std::size_t> path_heads(const Pag& g, PathSearch& search, std::size_t a,
                                    std::size_t target) {
  std::vector<std::size_t> heads;
  for (std::size_t mu : g.adjacencies(a)) {
    if (!potentially_directed(g, a, mu)) continue;
    if (mu == target || search.uncovered_pd(a, mu, target)) heads.push_back(mu);
  }
  return heads;
}

bool rule10(Pag& g) {
  bool changed = false;
  PathSearch search(g);
  for (std::size_t a = 0; a < g.size(); ++a) {
    for (std::size_t c : g.adjacencies(a)) {
      if (!circle_arrow(g, a, c)) continue;
      std::vector<std::size_t> into_c;
      for (std::size_t b : g.adjacencies(c)) {
        if (b != a && g.is_parent(b, c)) into_c.push_back(b);
      }
      bool fire = false;
      for (std::size_t i = 0; i < into_c.size() && !fire; ++i) {
        const auto heads1 = path_heads(g, search, a, into_c[i]);
        if (heads1.empty()) continue;
        for (std::size_t j = i + 1; j < into_c.size() && !fire; ++j) {
          const auto heads2 = path_heads(g, search, a, into_c[j]);
          for (std::size_t mu : heads1) {
            for (std::size_t omega : heads2) {
              if (mu != omega && !g.adjacent(mu, omega)) fire = true;
            }
          }
        }
      }
      if (fire) {
        g.set_mark(c, a, Mark::Tail);
        changed = true;
      }
    }
  }
  return changed;
}

}  // namespace

void orient_to_fixpoint(Pag& pag, const SepsetMap& sepsets) {
  bool changed = true;
  while (changed) {
    changed = false;
    changed |= rule1(pag);
    changed |= rule2(pag);
    changed |= rule3(pag);
    changed |= rule4(pag, sepsets);
    changed |= rule8(pag);
    changed |= rule9(pag);
    changed |= rule10(pag);
  }
}

}  // namespace mcns
