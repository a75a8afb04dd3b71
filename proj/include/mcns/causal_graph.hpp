#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "mcns/encode.hpp"
#include "mcns/graph.hpp"

namespace mcns {

struct CiResult {
  bool independent = true;
  double p_value = 1.0;
  double statistic = 0.0;
  double dof = 0.0;
  bool degenerate = false;     // a variable was constant in every usable stratum
  std::size_t pooled_out = 0;  // strata dropped for having < 5 samples
};

// G^2 likelihood-ratio test of i ⊥ j | cond on the discrete columns of `matrix`.
CiResult ci_test(const FactorMatrix& matrix, std::size_t i, std::size_t j,
                 const std::vector<std::size_t>& cond, double alpha);

struct DiscoveryOptions {
  double alpha = 0.05;
  std::size_t max_cond_size = 3;
  // Seed the skeleton with a greedy BIC hill-climb instead of the complete graph.
  bool warm_start = false;
  bool parallel = true;
};

using SepsetMap = std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>>;

struct DiscoveryResult {
  Pag pag;
  SepsetMap sepsets;  // keyed by (min, max)
  std::size_t tests_run = 0;
  std::size_t degenerate_tests = 0;
};

DiscoveryResult discover_pag(const FactorMatrix& matrix, const DiscoveryOptions& options = {});

// Runs the orientation rules (R1-R4, R8-R10) to fixpoint on a PAG whose
// colliders are already marked.
void orient_to_fixpoint(Pag& pag, const SepsetMap& sepsets);

struct ConstraintSet {
  std::optional<std::size_t> label;
  const PrecedenceRelation* precedence = nullptr;  // over factor nodes only
  double theta = 0.9;

  // Whether x -> y is ruled out by the label ban or the precedence ban.
  bool forbids(std::size_t x, std::size_t y) const;
};

Pag apply_constraints(const Pag& pag, const ConstraintSet& constraints);

struct Candidate {
  CausalDag dag;
  double weight = 0.0;  // resolution probability, renormalised over acyclic outcomes
};

struct CandidateSet {
  std::vector<Candidate> candidates;
  bool sampled = false;
  bool no_acyclic_candidate = false;
  std::size_t combinations = 0;  // raw resolution count (product of option counts)
};

struct ResolveOptions {
  std::size_t budget = 1000;
  std::uint64_t seed = 0;
  std::size_t enumeration_cutoff = 4096;
};

CandidateSet resolve_candidates(const Pag& pag, const ConstraintSet& constraints,
                                const ResolveOptions& options = {});

enum class Smoothing { Laplace, None };

double bic_score(const CausalDag& dag, const FactorMatrix& matrix,
                 Smoothing smoothing = Smoothing::Laplace);

struct Selection {
  std::size_t best = 0;
  CausalDag dag;
  std::vector<double> bic;  // per candidate, same order as the CandidateSet
};

Selection select_graph(const CandidateSet& candidates, const FactorMatrix& matrix,
                       Smoothing smoothing = Smoothing::Laplace);

// Greedy add/remove hill-climb on BIC; used as the optional discovery warm start.
CausalDag greedy_bic_search(const FactorMatrix& matrix, Smoothing smoothing = Smoothing::Laplace);

}  // namespace mcns
