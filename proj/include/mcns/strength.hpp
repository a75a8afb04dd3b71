#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <vector>

#include "mcns/causal_graph.hpp"
#include "mcns/encode.hpp"
#include "mcns/graph.hpp"
#include "mcns/snippets.hpp"

namespace mcns {

inline constexpr double kPropensityFloor = 0.01;
inline constexpr double kPropensityCeil = 0.99;
inline constexpr double kCaliperScale = 0.2;

struct StrengthMap {
  std::map<DirectedEdge, double> per_edge;
  std::vector<double> weights;  // candidate weights, same order as the CandidateSet

  double strength(std::size_t from, std::size_t to) const {
    auto it = per_edge.find(DirectedEdge{from, to});
    return it == per_edge.end() ? 0.0 : it->second;
  }
  bool operator==(const StrengthMap&) const = default;
};

// L2-penalised logistic regression of the treatment column on the other
// factor columns, minus `exclude` and the label. Scores are clamped to
// [0.01, 0.99].
std::vector<double> propensity_scores(const FactorMatrix& matrix, std::size_t treatment,
                                      const std::vector<std::size_t>& exclude = {});

struct MatchedPair {
  std::size_t row = 0;
  std::size_t match = 0;            // lowest-index nearest opposite-group row
  std::vector<std::size_t> ties;    // every opposite-group row at the same distance
  bool treated = false;
};

struct Matching {
  std::vector<MatchedPair> pairs;
  std::size_t unmatched = 0;
  double caliper = 0.0;
};

// Nearest-logit matching with replacement inside a 0.2 * SD(logit) caliper.
Matching match_pairs(const std::vector<double>& scores, const std::vector<int>& treatment);

// Matched-pair average treatment effect of node t on node y. Each row is
// compared against the mean outcome of its tie group.
double ate(const FactorMatrix& matrix, std::size_t t, std::size_t y, const Matching& matching);

// Propensity, matching and ATE in one call; excludes y from the covariates.
double edge_effect(const FactorMatrix& matrix, std::size_t t, std::size_t y);

// Softmax-weighted combination of per-edge effects over candidate graphs.
StrengthMap combine_strengths(const CandidateSet& candidates, const std::vector<double>& bic,
                              const std::function<double(const DirectedEdge&)>& phi);

StrengthMap edge_strengths(const CandidateSet& candidates, const std::vector<double>& bic,
                           const FactorMatrix& matrix, bool parallel = true);

// Per-step causal mass of one series: each step takes the largest
// |strength(factor -> label)| among the snippets covering it, then the vector
// is normalised. All-zero input falls back to uniform.
std::vector<double> timestep_strengths(std::size_t series_length,
                                       const std::vector<Snippet>& snippets,
                                       const std::vector<std::size_t>& assignments,
                                       const StrengthMap& strengths, std::size_t label_node);

}  // namespace mcns
