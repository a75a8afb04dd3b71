#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcns/causal_graph.hpp"
#include "mcns/encode.hpp"
#include "mcns/graph.hpp"
#include "mcns/kshape.hpp"
#include "mcns/series.hpp"
#include "mcns/strength.hpp"

namespace mcns {

struct RunConfig {
  std::uint64_t seed = 0;
  double alpha = 0.05;
  std::size_t n_clusters = 3;
  std::size_t k_snippets = 5;
  double theta_prec = 0.9;
  std::size_t bootstrap_b = 1000;
  std::optional<std::size_t> l_override;
  std::size_t max_cond_size = 3;
  bool warm_start = false;
  // Independent k-shape initialisations; the lowest objective wins.
  std::size_t kshape_restarts = 5;

  // Throws InvalidConfig on out-of-range fields.
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

struct ScoredCandidate {
  std::vector<DirectedEdge> edges;
  double resolution_weight = 0.0;
  double bic = 0.0;
  double bic_weight = 0.0;
  bool operator==(const ScoredCandidate&) const = default;
};

// The mined 4-tuple: factor shapes, optional label, selected DAG and strengths.
struct CausalStructure {
  std::vector<ShapeCluster> factors;
  std::optional<std::size_t> label;  // graph node index of the label (== factors.size())
  CausalDag graph;
  StrengthMap strengths;
  std::vector<ScoredCandidate> candidates;
  RunConfig config;
  std::size_t snippet_length = 0;
  std::vector<std::string> warnings;

  std::size_t factor_count() const noexcept { return factors.size(); }
  // Factors with an edge into the label node in the selected graph.
  std::vector<std::size_t> causal_factors() const;
  bool operator==(const CausalStructure&) const = default;
};

inline constexpr std::size_t kMinDiscoveryRows = 20;

CausalStructure build_structure(const Dataset& dataset, const RunConfig& config);

// Snippets of one series and the factor each is assigned to.
struct SeriesEncoding {
  std::vector<Snippet> snippets;
  std::vector<std::size_t> factors;
  std::vector<std::uint8_t> present;  // per factor
};

SeriesEncoding encode_series(const TimeSeries& series, const CausalStructure& structure);

struct Representation {
  std::vector<double> values;
  std::vector<std::uint8_t> mask;  // 1 = valid sample, 0 = padding
  std::vector<std::size_t> source_factors;
};

Representation represent(const TimeSeries& series, const CausalStructure& structure, std::size_t k,
                         std::size_t l);

// Mean per-position Euclidean distance over jointly valid positions; +inf
// when there are none.
double masked_distance(const Representation& a, const Representation& b);

int classify_knn(const std::vector<std::pair<Representation, int>>& train,
                 const Representation& test, std::size_t k_nn);

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);
double macro_f1(const std::vector<int>& predicted, const std::vector<int>& truth);

// Rows holding at least one factor with an edge into the label.
std::vector<bool> retained_rows(const FactorMatrix& matrix, const CausalDag& graph,
                                std::size_t label_node);

Dataset prune_dataset(const Dataset& dataset, const CausalStructure& structure);

double cir(const CausalStructure& structure);
double cir(const CausalStructure& structure, std::size_t n);

struct SweepCell {
  std::size_t l = 0;
  std::size_t k = 0;
  std::optional<double> cir;
  std::string error;  // set when the cell is missing
};

std::vector<SweepCell> sweep_parameters(const Dataset& dataset, const std::vector<std::size_t>& l_grid,
                                        const std::vector<std::size_t>& k_grid,
                                        const RunConfig& config);

}  // namespace mcns
