#include "mcns/causal_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

#include "mcns/error.hpp"

namespace mcns {

namespace {

constexpr std::size_t kMinStratumSize = 5;
constexpr double kScoreTieTolerance = 1e-9;

void check_node(const FactorMatrix& m, std::size_t v) {
  if (v >= m.node_count()) throw Error(ErrorCode::InvalidArgument, "node index out of range");
}

// Calls fn(subset) for each size-d subset of pool in lexicographic order until fn returns true.
template <typename Fn>
bool for_each_subset(const std::vector<std::size_t>& pool, std::size_t d, Fn&& fn) {
  if (d > pool.size()) return false;
  std::vector<std::size_t> idx(d);
  for (std::size_t i = 0; i < d; ++i) idx[i] = i;
  std::vector<std::size_t> subset(d);
  while (true) {
    for (std::size_t i = 0; i < d; ++i) subset[i] = pool[idx[i]];
    if (fn(subset)) return true;
    std::size_t i = d;
    while (i > 0 && idx[i - 1] == pool.size() - d + i - 1) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t k = i; k < d; ++k) idx[k] = idx[k - 1] + 1;
  }
}

}  // namespace

CiResult ci_test(const FactorMatrix& matrix, std::size_t i, std::size_t j,
                 const std::vector<std::size_t>& cond, double alpha) {
  check_node(matrix, i);
  check_node(matrix, j);
  if (i == j) throw Error(ErrorCode::InvalidArgument, "ci_test: i == j");
  for (std::size_t s : cond) {
    check_node(matrix, s);
    if (s == i || s == j) throw Error(ErrorCode::InvalidArgument, "ci_test: conditioning on a tested variable");
  }

  const std::size_t ri = static_cast<std::size_t>(matrix.arity(i));
  const std::size_t rj = static_cast<std::size_t>(matrix.arity(j));
  std::size_t strata = 1;
  for (std::size_t s : cond) strata *= static_cast<std::size_t>(matrix.arity(s));

  std::vector<double> counts(strata * ri * rj, 0.0);
  for (std::size_t row = 0; row < matrix.rows(); ++row) {
    std::size_t k = 0;
    for (std::size_t s : cond) k = k * matrix.arity(s) + matrix.value(s, row);
    const std::size_t a = matrix.value(i, row);
    const std::size_t b = matrix.value(j, row);
    counts[(k * ri + a) * rj + b] += 1.0;
  }

  CiResult out;
  bool informative = false;
  std::vector<double> row_sum(ri), col_sum(rj);
  for (std::size_t k = 0; k < strata; ++k) {
    const double* c = &counts[k * ri * rj];
    std::fill(row_sum.begin(), row_sum.end(), 0.0);
    std::fill(col_sum.begin(), col_sum.end(), 0.0);
    double total = 0.0;
    for (std::size_t a = 0; a < ri; ++a) {
      for (std::size_t b = 0; b < rj; ++b) {
        row_sum[a] += c[a * rj + b];
        col_sum[b] += c[a * rj + b];
        total += c[a * rj + b];
      }
    }
    if (total == 0.0) continue;
    if (total < kMinStratumSize) {
      ++out.pooled_out;
      continue;
    }
    out.dof += static_cast<double>((ri - 1) * (rj - 1));
    const auto levels = [](const std::vector<double>& v) {
      return std::count_if(v.begin(), v.end(), [](double x) { return x > 0.0; });
    };
    if (levels(row_sum) < 2 || levels(col_sum) < 2) continue;
    informative = true;
    for (std::size_t a = 0; a < ri; ++a) {
      for (std::size_t b = 0; b < rj; ++b) {
        const double n = c[a * rj + b];
        if (n > 0.0) out.statistic += 2.0 * n * std::log(n * total / (row_sum[a] * col_sum[b]));
      }
    }
  }

  if (!informative || out.dof <= 0.0) {
    out.degenerate = true;
    out.independent = true;
    out.p_value = 1.0;
    out.statistic = 0.0;
    return out;
  }
  out.statistic = std::max(0.0, out.statistic);
  out.p_value = boost::math::gamma_q(out.dof / 2.0, out.statistic / 2.0);
  out.independent = out.p_value > alpha;
  return out;
}

DiscoveryResult discover_pag(const FactorMatrix& matrix, const DiscoveryOptions& options) {
  const std::size_t n = matrix.node_count();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "discover_pag: need at least two variables");
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "discover_pag: alpha must be in (0, 1)");
  }
  const std::optional<std::size_t> label =
      matrix.has_label() ? std::optional<std::size_t>(matrix.label_node()) : std::nullopt;

  std::vector<std::uint8_t> adj(n * n, 1);
  for (std::size_t v = 0; v < n; ++v) adj[v * n + v] = 0;
  if (options.warm_start) {
    const CausalDag seed = greedy_bic_search(matrix);
    std::fill(adj.begin(), adj.end(), 0);
    for (const auto& e : seed.edges) adj[e.from * n + e.to] = adj[e.to * n + e.from] = 1;
  }

  DiscoveryResult result;
  for (std::size_t depth = 0; depth <= options.max_cond_size; ++depth) {
    const std::vector<std::uint8_t> snapshot = adj;
    auto neighbours = [&](std::size_t x, std::size_t skip) {
      std::vector<std::size_t> out;
      for (std::size_t v = 0; v < n; ++v) {
        if (v != skip && snapshot[x * n + v]) out.push_back(v);
      }
      return out;
    };

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = x + 1; y < n; ++y) {
        if (snapshot[x * n + y]) pairs.emplace_back(x, y);
      }
    }

    struct Outcome {
      bool testable = false;
      bool removed = false;
      std::vector<std::size_t> sepset;
      std::size_t tests = 0;
      std::size_t degenerate = 0;
    };
    std::vector<Outcome> outcomes(pairs.size());
    std::vector<std::exception_ptr> errors(pairs.size());

#pragma omp parallel for schedule(dynamic) if (options.parallel)
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      try {
        const auto [x, y] = pairs[p];
        Outcome& o = outcomes[p];
        for (const auto& [from, other] : {std::pair{x, y}, std::pair{y, x}}) {
          const auto pool = neighbours(from, other);
          if (pool.size() < depth) continue;
          o.testable = true;
          const bool found = for_each_subset(pool, depth, [&](const std::vector<std::size_t>& s) {
            const CiResult r = ci_test(matrix, x, y, s, options.alpha);
            ++o.tests;
            if (r.degenerate) ++o.degenerate;
            if (r.independent) {
              o.removed = true;
              o.sepset = s;
              return true;
            }
            return false;
          });
          if (found) break;
        }
      } catch (...) {
        errors[p] = std::current_exception();
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }

    bool any_testable = false;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto [x, y] = pairs[p];
      any_testable |= outcomes[p].testable;
      result.tests_run += outcomes[p].tests;
      result.degenerate_tests += outcomes[p].degenerate;
      if (outcomes[p].removed) {
        adj[x * n + y] = adj[y * n + x] = 0;
        result.sepsets[{x, y}] = std::move(outcomes[p].sepset);
      }
    }
    if (!any_testable) break;
  }

  // Pairs the warm start never connected still need separating sets for orientation.
  if (options.warm_start) {
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = x + 1; y < n; ++y) {
        if (adj[x * n + y] || result.sepsets.count({x, y})) continue;
        std::vector<std::size_t> pool;
        for (std::size_t v = 0; v < n; ++v) {
          if (v != x && v != y && (adj[x * n + v] || adj[y * n + v])) pool.push_back(v);
        }
        std::vector<std::size_t> sep;
        for (std::size_t d = 0; d <= std::min(options.max_cond_size, pool.size()); ++d) {
          if (for_each_subset(pool, d, [&](const std::vector<std::size_t>& s) {
                const CiResult r = ci_test(matrix, x, y, s, options.alpha);
                ++result.tests_run;
                if (r.degenerate) ++result.degenerate_tests;
                if (r.independent) sep = s;
                return r.independent;
              })) {
            break;
          }
        }
        result.sepsets[{x, y}] = sep;
      }
    }
  }

  Pag pag(n, label);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      if (adj[x * n + y]) pag.add_edge(x, y, Mark::Circle, Mark::Circle);
    }
  }

  // Unshielded colliders x *-> z <-* y with z outside sepset(x, y).
  for (std::size_t z = 0; z < n; ++z) {
    const auto around = pag.adjacencies(z);
    for (std::size_t a = 0; a < around.size(); ++a) {
      for (std::size_t b = a + 1; b < around.size(); ++b) {
        const std::size_t x = around[a];
        const std::size_t y = around[b];
        if (pag.adjacent(x, y)) continue;
        auto it = result.sepsets.find({std::min(x, y), std::max(x, y)});
        if (it == result.sepsets.end()) continue;
        if (std::find(it->second.begin(), it->second.end(), z) != it->second.end()) continue;
        pag.set_mark(x, z, Mark::Arrow);
        pag.set_mark(y, z, Mark::Arrow);
      }
    }
  }

  orient_to_fixpoint(pag, result.sepsets);
  result.pag = std::move(pag);
  return result;
}

bool ConstraintSet::forbids(std::size_t x, std::size_t y) const {
  if (label && x == *label) return true;
  if (precedence && x < precedence->factor_count && y < precedence->factor_count) {
    return precedence->after(x, y) >= theta;
  }
  return false;
}

Pag apply_constraints(const Pag& pag, const ConstraintSet& constraints) {
  if (!(constraints.theta > 0.5 && constraints.theta <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "precedence threshold must be in (0.5, 1]");
  }
  Pag out = pag;
  for (const auto& e : pag.edges()) {
    // forbids(x, y) bans x -> y, which is enforced by an arrowhead at x.
    if (constraints.forbids(e.a, e.b)) out.set_mark(e.b, e.a, Mark::Arrow);
    if (constraints.forbids(e.b, e.a)) out.set_mark(e.a, e.b, Mark::Arrow);
  }
  return out;
}

namespace {

struct Option {
  bool present = false;
  DirectedEdge edge;
};

}  // namespace

CandidateSet resolve_candidates(const Pag& pag, const ConstraintSet& constraints,
                                const ResolveOptions& options) {
  const std::size_t n = pag.size();
  CausalDag base{n, pag.label(), {}};
  std::vector<std::vector<Option>> uncertain;

  for (const auto& e : pag.edges()) {
    switch (edge_kind(e.at_a, e.at_b)) {
      case EdgeKind::Directed:
        if (e.at_b == Mark::Arrow) base.add_edge(e.a, e.b);
        else base.add_edge(e.b, e.a);
        break;
      case EdgeKind::Bidirected:
        break;
      case EdgeKind::CircleArrow: {
        const std::size_t from = e.at_a == Mark::Circle ? e.a : e.b;
        const std::size_t to = from == e.a ? e.b : e.a;
        std::vector<Option> opts;
        if (!constraints.forbids(from, to)) opts.push_back({true, {from, to}});
        opts.push_back({false, {}});
        if (opts.size() > 1) uncertain.push_back(std::move(opts));
        break;
      }
      case EdgeKind::CircleCircle: {
        std::vector<Option> opts;
        if (!constraints.forbids(e.a, e.b)) opts.push_back({true, {e.a, e.b}});
        if (!constraints.forbids(e.b, e.a)) opts.push_back({true, {e.b, e.a}});
        opts.push_back({false, {}});
        if (opts.size() > 1) uncertain.push_back(std::move(opts));
        break;
      }
      case EdgeKind::Inadmissible:
        throw Error(ErrorCode::InvalidArgument, "resolve_candidates: inadmissible edge marks");
    }
  }

  CandidateSet out;
  const std::size_t cutoff = options.enumeration_cutoff;
  std::size_t combos = 1;
  bool overflow = false;
  for (const auto& u : uncertain) {
    if (combos > std::numeric_limits<std::size_t>::max() / u.size()) {
      overflow = true;
      combos = std::numeric_limits<std::size_t>::max();
      break;
    }
    combos *= u.size();
  }
  out.combinations = combos;

  std::map<std::vector<DirectedEdge>, Candidate> merged;
  auto build = [&](const std::vector<std::size_t>& choice) {
    CausalDag dag = base;
    for (std::size_t k = 0; k < uncertain.size(); ++k) {
      const Option& o = uncertain[k][choice[k]];
      if (o.present) dag.add_edge(o.edge.from, o.edge.to);
    }
    return dag;
  };
  auto accept = [&](CausalDag dag, double w) {
    if (!is_acyclic(dag)) return;
    auto [it, inserted] = merged.try_emplace(dag.edges, Candidate{dag, 0.0});
    it->second.weight += w;
  };

  std::vector<std::size_t> choice(uncertain.size(), 0);
  if (!overflow && combos <= cutoff) {
    double w = 1.0;
    for (const auto& u : uncertain) w /= static_cast<double>(u.size());
    while (true) {
      accept(build(choice), w);
      std::size_t k = 0;
      while (k < choice.size() && ++choice[k] == uncertain[k].size()) choice[k++] = 0;
      if (k == choice.size()) break;
    }
  } else {
    out.sampled = true;
    std::mt19937_64 rng(options.seed);
    const std::size_t draws = std::max<std::size_t>(1, options.budget);
    for (std::size_t b = 0; b < draws; ++b) {
      for (std::size_t k = 0; k < uncertain.size(); ++k) choice[k] = rng() % uncertain[k].size();
      accept(build(choice), 1.0);
    }
  }

  double total = 0.0;
  for (const auto& [edges, c] : merged) total += c.weight;
  if (merged.empty() || total <= 0.0) {
    out.no_acyclic_candidate = true;
    out.candidates.push_back(Candidate{CausalDag{n, pag.label(), {}}, 1.0});
    return out;
  }
  for (auto& [edges, c] : merged) {
    c.weight /= total;
    out.candidates.push_back(std::move(c));
  }
  return out;
}

namespace {

double local_score(std::size_t v, const std::vector<std::size_t>& parents, const FactorMatrix& m,
                   Smoothing smoothing) {
  const std::size_t rv = static_cast<std::size_t>(m.arity(v));
  std::size_t configs = 1;
  for (std::size_t p : parents) configs *= static_cast<std::size_t>(m.arity(p));
  std::vector<double> counts(configs * rv, 0.0);
  for (std::size_t row = 0; row < m.rows(); ++row) {
    std::size_t k = 0;
    for (std::size_t p : parents) k = k * m.arity(p) + m.value(p, row);
    counts[k * rv + m.value(v, row)] += 1.0;
  }
  const double pseudo = smoothing == Smoothing::Laplace ? 1.0 : 0.0;
  double ll = 0.0;
  for (std::size_t k = 0; k < configs; ++k) {
    double total = 0.0;
    for (std::size_t a = 0; a < rv; ++a) total += counts[k * rv + a];
    const double denom = total + pseudo * static_cast<double>(rv);
    for (std::size_t a = 0; a < rv; ++a) {
      const double c = counts[k * rv + a];
      if (c > 0.0) ll += c * std::log((c + pseudo) / denom);
    }
  }
  const double params = static_cast<double>((rv - 1) * configs);
  return ll - 0.5 * params * std::log(static_cast<double>(m.rows()));
}

}  // namespace

double bic_score(const CausalDag& dag, const FactorMatrix& matrix, Smoothing smoothing) {
  if (dag.node_count != matrix.node_count()) {
    throw Error(ErrorCode::InvalidArgument, "bic_score: graph and matrix disagree on node count");
  }
  if (matrix.rows() == 0) throw Error(ErrorCode::EmptyDataset, "bic_score: no rows");
  double score = 0.0;
  for (std::size_t v = 0; v < dag.node_count; ++v) {
    score += local_score(v, dag.parents(v), matrix, smoothing);
  }
  return score;
}

Selection select_graph(const CandidateSet& candidates, const FactorMatrix& matrix,
                       Smoothing smoothing) {
  if (candidates.candidates.empty()) {
    throw Error(ErrorCode::InvalidArgument, "select_graph: no candidates");
  }
  const auto& cs = candidates.candidates;
  Selection sel;
  sel.bic.resize(cs.size());
  std::vector<std::exception_ptr> errors(cs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t q = 0; q < cs.size(); ++q) {
    try {
      sel.bic[q] = bic_score(cs[q].dag, matrix, smoothing);
    } catch (...) {
      errors[q] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::size_t best = 0;
  for (std::size_t q = 1; q < cs.size(); ++q) {
    const double diff = sel.bic[q] - sel.bic[best];
    if (diff > kScoreTieTolerance) {
      best = q;
    } else if (diff >= -kScoreTieTolerance) {
      const auto& a = cs[q].dag.edges;
      const auto& b = cs[best].dag.edges;
      if (a.size() < b.size() || (a.size() == b.size() && a < b)) best = q;
    }
  }
  sel.best = best;
  sel.dag = cs[best].dag;
  return sel;
}

CausalDag greedy_bic_search(const FactorMatrix& matrix, Smoothing smoothing) {
  const std::size_t n = matrix.node_count();
  CausalDag dag{n,
                matrix.has_label() ? std::optional<std::size_t>(matrix.label_node()) : std::nullopt,
                {}};
  std::vector<double> local(n);
  for (std::size_t v = 0; v < n; ++v) local[v] = local_score(v, {}, matrix, smoothing);

  while (true) {
    double best_gain = kScoreTieTolerance;
    std::optional<std::pair<DirectedEdge, bool>> best_move;  // (edge, add?)
    for (std::size_t from = 0; from < n; ++from) {
      for (std::size_t to = 0; to < n; ++to) {
        if (from == to) continue;
        const bool present = dag.has_edge(from, to);
        if (!present && dag.has_edge(to, from)) continue;
        CausalDag trial = dag;
        if (present) {
          trial.edges.erase(std::find(trial.edges.begin(), trial.edges.end(), DirectedEdge{from, to}));
        } else {
          trial.add_edge(from, to);
          if (!is_acyclic(trial)) continue;
        }
        const double gain = local_score(to, trial.parents(to), matrix, smoothing) - local[to];
        if (gain > best_gain) {
          best_gain = gain;
          best_move = {{DirectedEdge{from, to}, !present}};
        }
      }
    }
    if (!best_move) break;
    const auto [edge, add] = *best_move;
    if (add) dag.add_edge(edge.from, edge.to);
    else dag.edges.erase(std::find(dag.edges.begin(), dag.edges.end(), edge));
    local[edge.to] = local_score(edge.to, dag.parents(edge.to), matrix, smoothing);
  }
  return dag;
}

}  // namespace mcns
