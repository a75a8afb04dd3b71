#include "mcns/structure.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <set>

#include "mcns/error.hpp"
#include "mcns/snippets.hpp"

namespace mcns {

namespace {

template <typename Fn>
auto in_stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (!e.stage().empty()) throw;
    throw e.with_stage(name);
  }
}

SnippetOptions inner_snippet_options() {
  SnippetOptions o;
  o.parallel = false;  // callers already parallelise over series
  return o;
}

template <typename Fn>
void parallel_rows(std::size_t count, Fn&& fn) {
  std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t r = 0; r < count; ++r) {
    try {
      fn(r);
    } catch (...) {
      errors[r] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void RunConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidConfig, "alpha must be in (0, 1)");
  if (!(theta_prec > 0.5 && theta_prec <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "thetaPrec must be in (0.5, 1]");
  }
  if (k_snippets < 1) throw Error(ErrorCode::InvalidConfig, "kSnippets must be at least 1");
  if (n_clusters < 1) throw Error(ErrorCode::InvalidConfig, "nClusters must be at least 1");
  if (kshape_restarts < 1) throw Error(ErrorCode::InvalidConfig, "kshapeRestarts must be at least 1");
  if (bootstrap_b < 1) throw Error(ErrorCode::InvalidConfig, "bootstrapB must be at least 1");
  if (l_override && *l_override < 2) throw Error(ErrorCode::InvalidConfig, "lOverride must be at least 2");
}

std::vector<std::size_t> CausalStructure::causal_factors() const {
  std::vector<std::size_t> out;
  if (!label) return out;
  for (std::size_t f = 0; f < factors.size(); ++f) {
    if (graph.has_edge(f, *label)) out.push_back(f);
  }
  return out;
}

CausalStructure build_structure(const Dataset& dataset, const RunConfig& config) {
  config.validate();
  if (dataset.empty()) throw Error(ErrorCode::EmptyDataset, "build_structure: empty dataset", "input");
  in_stage("input", [&] { dataset.validate(); return 0; });

  CausalStructure out;
  out.config = config;
  out.snippet_length =
      config.l_override ? *config.l_override : in_stage("unified_length", [&] { return unified_length(dataset); });
  const std::size_t l = out.snippet_length;

  SnippetTable snippets(dataset.size());
  in_stage("discover_snippets", [&] {
    parallel_rows(dataset.size(), [&](std::size_t r) {
      snippets[r] = discover_snippets(dataset.series[r], config.k_snippets, l, inner_snippet_options());
    });
    return 0;
  });

  std::vector<Snippet> pooled;
  for (const auto& row : snippets) pooled.insert(pooled.end(), row.begin(), row.end());
  KShapeOptions kopts;
  kopts.restarts = config.kshape_restarts;
  out.factors = in_stage("kshape_cluster",
                         [&] { return kshape_cluster(pooled, config.n_clusters, config.seed, kopts); });

  FactorAssignments assignments;
  const FactorMatrix matrix = in_stage("encode_dataset", [&] {
    assignments = assign_factors(snippets, out.factors);
    return encode_assignments(dataset, assignments, out.factors.size());
  });
  const PrecedenceRelation precedence = in_stage("encode_dataset", [&] {
    return temporal_precedence(dataset, snippets, assignments, out.factors.size());
  });

  if (matrix.has_label()) out.label = matrix.label_node();
  out.graph = CausalDag{matrix.node_count(), out.label, {}};

  if (matrix.rows() < kMinDiscoveryRows) {
    out.warnings.push_back("discovery skipped: " + std::to_string(matrix.rows()) +
                           " series is below the minimum of " + std::to_string(kMinDiscoveryRows) +
                           "; returning the empty graph");
    return out;
  }
  if (matrix.node_count() < 2) {
    out.warnings.push_back("discovery skipped: fewer than two graph nodes");
    return out;
  }

  DiscoveryOptions dopts;
  dopts.alpha = config.alpha;
  dopts.max_cond_size = config.max_cond_size;
  dopts.warm_start = config.warm_start;
  const DiscoveryResult discovery = in_stage("discover_pag", [&] { return discover_pag(matrix, dopts); });

  ConstraintSet constraints;
  constraints.label = out.label;
  constraints.precedence = &precedence;
  constraints.theta = config.theta_prec;
  const Pag constrained = in_stage("apply_constraints", [&] { return apply_constraints(discovery.pag, constraints); });

  ResolveOptions ropts;
  ropts.budget = config.bootstrap_b;
  ropts.seed = config.seed;
  const CandidateSet candidates =
      in_stage("resolve_candidates", [&] { return resolve_candidates(constrained, constraints, ropts); });
  if (candidates.no_acyclic_candidate) out.warnings.push_back("no acyclic resolution; using the empty graph");
  if (candidates.sampled) {
    out.warnings.push_back("candidate resolutions sampled (" + std::to_string(config.bootstrap_b) + " draws)");
  }

  const Selection selection = in_stage("select_graph", [&] { return select_graph(candidates, matrix); });
  out.graph = selection.dag;
  out.strengths =
      in_stage("edge_strengths", [&] { return edge_strengths(candidates, selection.bic, matrix); });

  for (std::size_t q = 0; q < candidates.candidates.size(); ++q) {
    out.candidates.push_back(ScoredCandidate{candidates.candidates[q].dag.edges,
                                             candidates.candidates[q].weight, selection.bic[q],
                                             out.strengths.weights[q]});
  }
  return out;
}

SeriesEncoding encode_series(const TimeSeries& series, const CausalStructure& structure) {
  SeriesEncoding enc;
  enc.snippets = discover_snippets(series, structure.config.k_snippets, structure.snippet_length,
                                   inner_snippet_options());
  enc.present.assign(structure.factors.size(), 0);
  for (const auto& s : enc.snippets) {
    const std::size_t f = assign_factor(s, structure.factors);
    enc.factors.push_back(f);
    enc.present[f] = 1;
  }
  return enc;
}

Representation represent(const TimeSeries& series, const CausalStructure& structure, std::size_t k,
                         std::size_t l) {
  const auto snippets = discover_snippets(series, k, l, inner_snippet_options());
  const auto causal = structure.causal_factors();

  std::vector<std::size_t> factor_of(snippets.size(), 0);
  bool any_causal = false;
  for (std::size_t i = 0; i < snippets.size(); ++i) {
    factor_of[i] = structure.factors.empty() ? 0 : assign_factor(snippets[i], structure.factors);
    if (!structure.factors.empty() &&
        std::find(causal.begin(), causal.end(), factor_of[i]) != causal.end()) {
      any_causal = true;
    }
  }

  std::vector<std::size_t> order(snippets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return snippets[a].rank < snippets[b].rank; });

  Representation rep;
  for (std::size_t i : order) {
    if (any_causal && std::find(causal.begin(), causal.end(), factor_of[i]) == causal.end()) continue;
    const auto& v = snippets[i].subsequence.values;
    rep.values.insert(rep.values.end(), v.begin(), v.end());
    rep.source_factors.push_back(factor_of[i]);
  }
  rep.mask.assign(rep.values.size(), 1);
  const std::size_t full = k * l;
  if (rep.values.size() < full) {
    rep.values.resize(full, 0.0);
    rep.mask.resize(full, 0);
  }
  return rep;
}

double masked_distance(const Representation& a, const Representation& b) {
  const std::size_t n = std::min(a.values.size(), b.values.size());
  double sq = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!a.mask[i] || !b.mask[i]) continue;
    const double d = a.values[i] - b.values[i];
    sq += d * d;
    ++count;
  }
  if (count == 0) return std::numeric_limits<double>::infinity();
  return std::sqrt(sq) / static_cast<double>(count);
}

int classify_knn(const std::vector<std::pair<Representation, int>>& train,
                 const Representation& test, std::size_t k_nn) {
  if (train.empty()) throw Error(ErrorCode::EmptyDataset, "classify_knn: empty training set");
  if (k_nn == 0 || k_nn % 2 == 0) throw Error(ErrorCode::InvalidArgument, "classify_knn: kNN must be odd");

  std::vector<std::pair<double, std::size_t>> dist;
  for (std::size_t i = 0; i < train.size(); ++i) {
    const double d = masked_distance(train[i].first, test);
    if (std::isfinite(d)) dist.emplace_back(d, i);
  }
  if (dist.empty()) throw Error(ErrorCode::NoOverlap, "classify_knn: no training representation overlaps the query");
  std::sort(dist.begin(), dist.end());
  const std::size_t take = std::min(k_nn, dist.size());

  std::map<int, std::size_t> votes;
  for (std::size_t i = 0; i < take; ++i) ++votes[train[dist[i].second].second];
  std::size_t top = 0;
  for (const auto& [label, v] : votes) top = std::max(top, v);
  for (std::size_t i = 0; i < take; ++i) {
    const int label = train[dist[i].second].second;
    if (votes[label] == top) return label;
  }
  return train[dist.front().second].second;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) throw Error(ErrorCode::LengthMismatch, "accuracy: length mismatch");
  if (truth.empty()) throw Error(ErrorCode::EmptyInput, "accuracy: no predictions");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

double macro_f1(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) throw Error(ErrorCode::LengthMismatch, "macro_f1: length mismatch");
  if (truth.empty()) throw Error(ErrorCode::EmptyInput, "macro_f1: no predictions");
  std::set<int> classes(truth.begin(), truth.end());
  classes.insert(predicted.begin(), predicted.end());
  double sum = 0.0;
  for (int c : classes) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (predicted[i] == c && truth[i] == c) ++tp;
      else if (predicted[i] == c) ++fp;
      else if (truth[i] == c) ++fn;
    }
    const double denom = static_cast<double>(2 * tp + fp + fn);
    sum += denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
  }
  return sum / static_cast<double>(classes.size());
}

std::vector<bool> retained_rows(const FactorMatrix& matrix, const CausalDag& graph,
                                std::size_t label_node) {
  std::vector<bool> keep(matrix.rows(), false);
  for (std::size_t f = 0; f < matrix.factor_count(); ++f) {
    if (!graph.has_edge(f, label_node)) continue;
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
      if (matrix.bit(r, f)) keep[r] = true;
    }
  }
  return keep;
}

Dataset prune_dataset(const Dataset& dataset, const CausalStructure& structure) {
  if (!structure.label) throw Error(ErrorCode::NoLabel, "prune_dataset: structure has no label node");
  const auto causal = structure.causal_factors();
  std::vector<std::uint8_t> keep(dataset.size(), 0);
  if (!causal.empty()) {
    parallel_rows(dataset.size(), [&](std::size_t r) {
      const auto enc = encode_series(dataset.series[r], structure);
      for (std::size_t f : causal) {
        if (enc.present[f]) keep[r] = 1;
      }
    });
  }
  Dataset out;
  out.class_count = dataset.class_count;
  out.label_names = dataset.label_names;
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    if (keep[r]) out.series.push_back(dataset.series[r]);
  }
  return out;
}

double cir(const CausalStructure& structure, std::size_t n) {
  if (!structure.label) throw Error(ErrorCode::NoLabel, "cir: structure has no label node");
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "cir: factor count must be positive");
  return static_cast<double>(structure.causal_factors().size()) / static_cast<double>(n);
}

double cir(const CausalStructure& structure) { return cir(structure, structure.factor_count()); }

std::vector<SweepCell> sweep_parameters(const Dataset& dataset, const std::vector<std::size_t>& l_grid,
                                        const std::vector<std::size_t>& k_grid,
                                        const RunConfig& config) {
  if (l_grid.empty() || k_grid.empty()) throw Error(ErrorCode::InvalidArgument, "sweep: empty grid");
  std::vector<SweepCell> cells;
  for (std::size_t l : l_grid) {
    for (std::size_t k : k_grid) cells.push_back(SweepCell{l, k, std::nullopt, {}});
  }
#pragma omp parallel for schedule(dynamic)
  for (std::size_t c = 0; c < cells.size(); ++c) {
    RunConfig cfg = config;
    cfg.l_override = cells[c].l;
    cfg.k_snippets = cells[c].k;
    try {
      const auto s = build_structure(dataset, cfg);
      if (s.label) cells[c].cir = cir(s);
      else cells[c].error = std::string(to_string(ErrorCode::NoLabel));
    } catch (const Error& e) {
      cells[c].error = std::string(to_string(e.code())) + ": " + e.what();
    } catch (const std::exception& e) {
      cells[c].error = e.what();
    }
  }
  return cells;
}

}  // namespace mcns
