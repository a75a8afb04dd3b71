#include "mcns/strength.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <set>

#include <Eigen/Dense>

#include "mcns/error.hpp"

namespace mcns {

namespace {

constexpr double kRidge = 1e-3;
constexpr int kMaxIrls = 100;
constexpr double kIrlsTolerance = 1e-8;

double logit(double p) { return std::log(p / (1.0 - p)); }

std::vector<int> column(const FactorMatrix& m, std::size_t node) {
  std::vector<int> out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) out[r] = m.value(node, r);
  return out;
}

// Outcome as a 0/1 vector. A label with more than two classes is reduced to
// the indicator of its most common class among treated rows.
std::vector<int> outcome_column(const FactorMatrix& m, std::size_t y, const std::vector<int>& t) {
  std::vector<int> out = column(m, y);
  if (y < m.factor_count() || m.class_count <= 2) return out;
  std::vector<std::size_t> freq(m.class_count, 0);
  for (std::size_t r = 0; r < out.size(); ++r) {
    if (t[r] == 1) ++freq[out[r]];
  }
  const int modal = static_cast<int>(std::max_element(freq.begin(), freq.end()) - freq.begin());
  for (int& v : out) v = v == modal ? 1 : 0;
  return out;
}

}  // namespace

std::vector<double> propensity_scores(const FactorMatrix& matrix, std::size_t treatment,
                                      const std::vector<std::size_t>& exclude) {
  if (treatment >= matrix.factor_count()) {
    throw Error(ErrorCode::InvalidArgument, "propensity_scores: treatment must be a factor column");
  }
  const std::size_t n = matrix.rows();
  const auto t = column(matrix, treatment);
  const std::size_t treated = static_cast<std::size_t>(std::count(t.begin(), t.end(), 1));
  if (treated == 0 || treated == n) {
    throw Error(ErrorCode::DegenerateTreatment, "treatment column F" + std::to_string(treatment) +
                                                    " is constant");
  }

  std::vector<std::size_t> covariates;
  for (std::size_t f = 0; f < matrix.factor_count(); ++f) {
    if (f == treatment || std::find(exclude.begin(), exclude.end(), f) != exclude.end()) continue;
    covariates.push_back(f);
  }

  const Eigen::Index p = static_cast<Eigen::Index>(covariates.size()) + 1;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), p);
  Eigen::VectorXd target(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const auto ri = static_cast<Eigen::Index>(r);
    x(ri, 0) = 1.0;
    for (std::size_t c = 0; c < covariates.size(); ++c) {
      x(ri, static_cast<Eigen::Index>(c) + 1) = matrix.bit(r, covariates[c]);
    }
    target(ri) = t[r];
  }

  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(p, kRidge);
  penalty(0) = 0.0;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  for (int it = 0; it < kMaxIrls; ++it) {
    const Eigen::VectorXd eta = x * beta;
    const Eigen::VectorXd mu = eta.unaryExpr([](double e) { return 1.0 / (1.0 + std::exp(-e)); });
    const Eigen::VectorXd w = mu.unaryExpr([](double m) { return std::max(m * (1.0 - m), 1e-12); });
    Eigen::MatrixXd hessian = x.transpose() * w.asDiagonal() * x;
    hessian.diagonal() += penalty;
    const Eigen::VectorXd gradient = x.transpose() * (target - mu) - penalty.cwiseProduct(beta);
    const Eigen::VectorXd step = hessian.ldlt().solve(gradient);
    if (!step.allFinite()) break;
    beta += step;
    if (step.cwiseAbs().maxCoeff() < kIrlsTolerance) break;
  }

  const Eigen::VectorXd eta = x * beta;
  std::vector<double> scores(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double s = 1.0 / (1.0 + std::exp(-eta(static_cast<Eigen::Index>(r))));
    scores[r] = std::clamp(s, kPropensityFloor, kPropensityCeil);
  }
  return scores;
}

Matching match_pairs(const std::vector<double>& scores, const std::vector<int>& treatment) {
  if (scores.size() != treatment.size()) {
    throw Error(ErrorCode::LengthMismatch, "match_pairs: scores and treatment differ in length");
  }
  const std::size_t n = scores.size();
  std::vector<double> lg(n);
  for (std::size_t r = 0; r < n; ++r) {
    lg[r] = logit(std::clamp(scores[r], kPropensityFloor, kPropensityCeil));
  }

  // Opposite-group lookup tables sorted by (logit, row).
  std::vector<std::pair<double, std::size_t>> groups[2];
  for (std::size_t r = 0; r < n; ++r) groups[treatment[r] == 1 ? 1 : 0].emplace_back(lg[r], r);
  if (groups[0].empty() || groups[1].empty()) {
    throw Error(ErrorCode::DegenerateTreatment, "match_pairs: one treatment group is empty");
  }
  for (auto& g : groups) std::sort(g.begin(), g.end());

  const double mean = std::accumulate(lg.begin(), lg.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double v : lg) var += (v - mean) * (v - mean);
  Matching out;
  out.caliper = kCaliperScale * std::sqrt(var / static_cast<double>(n));

  auto rows_at = [](const std::vector<std::pair<double, std::size_t>>& g, double value,
                    std::vector<std::size_t>& into) {
    auto lo = std::lower_bound(g.begin(), g.end(), std::pair{value, std::size_t{0}});
    for (; lo != g.end() && lo->first == value; ++lo) into.push_back(lo->second);
  };

  for (std::size_t r = 0; r < n; ++r) {
    const bool treated = treatment[r] == 1;
    const auto& other = groups[treated ? 0 : 1];
    const double v = lg[r];
    auto it = std::lower_bound(other.begin(), other.end(), std::pair{v, std::size_t{0}});
    double best = std::numeric_limits<double>::infinity();
    if (it != other.end()) best = std::min(best, it->first - v);
    if (it != other.begin()) best = std::min(best, v - std::prev(it)->first);
    if (!(best <= out.caliper)) {
      ++out.unmatched;
      continue;
    }
    MatchedPair pair;
    pair.row = r;
    pair.treated = treated;
    std::set<double> values;
    if (it != other.end() && it->first - v == best) values.insert(it->first);
    if (it != other.begin() && v - std::prev(it)->first == best) values.insert(std::prev(it)->first);
    for (double value : values) rows_at(other, value, pair.ties);
    std::sort(pair.ties.begin(), pair.ties.end());
    pair.match = pair.ties.front();
    out.pairs.push_back(std::move(pair));
  }
  if (out.pairs.empty()) throw Error(ErrorCode::NoMatches, "match_pairs: caliper excluded every row");
  return out;
}

double ate(const FactorMatrix& matrix, std::size_t t, std::size_t y, const Matching& matching) {
  if (matching.pairs.empty()) throw Error(ErrorCode::NoMatches, "ate: no matched pairs");
  if (t >= matrix.node_count() || y >= matrix.node_count()) {
    throw Error(ErrorCode::InvalidArgument, "ate: node index out of range");
  }
  const auto tv = column(matrix, t);
  const auto yv = outcome_column(matrix, y, tv);
  double sum = 0.0;
  for (const auto& p : matching.pairs) {
    double counterfactual = 0.0;
    for (std::size_t j : p.ties) counterfactual += yv[j];
    counterfactual /= static_cast<double>(p.ties.size());
    const double delta = yv[p.row] - counterfactual;
    sum += p.treated ? delta : -delta;
  }
  return sum / static_cast<double>(matching.pairs.size());
}

double edge_effect(const FactorMatrix& matrix, std::size_t t, std::size_t y) {
  std::vector<std::size_t> exclude;
  if (y < matrix.factor_count()) exclude.push_back(y);
  const auto scores = propensity_scores(matrix, t, exclude);
  return ate(matrix, t, y, match_pairs(scores, column(matrix, t)));
}

StrengthMap combine_strengths(const CandidateSet& candidates, const std::vector<double>& bic,
                              const std::function<double(const DirectedEdge&)>& phi) {
  const auto& cs = candidates.candidates;
  if (bic.size() != cs.size()) {
    throw Error(ErrorCode::LengthMismatch, "combine_strengths: one score per candidate required");
  }
  StrengthMap out;
  if (cs.empty()) return out;
  const double top = *std::max_element(bic.begin(), bic.end());
  out.weights.resize(cs.size());
  double total = 0.0;
  for (std::size_t q = 0; q < cs.size(); ++q) total += out.weights[q] = std::exp(bic[q] - top);
  for (double& w : out.weights) w /= total;

  for (std::size_t q = 0; q < cs.size(); ++q) {
    if (out.weights[q] <= 0.0) continue;
    for (const auto& e : cs[q].dag.edges) out.per_edge[e] += out.weights[q] * phi(e);
  }
  return out;
}

StrengthMap edge_strengths(const CandidateSet& candidates, const std::vector<double>& bic,
                           const FactorMatrix& matrix, bool parallel) {
  std::set<DirectedEdge> edge_set;
  for (const auto& c : candidates.candidates) edge_set.insert(c.dag.edges.begin(), c.dag.edges.end());
  const std::vector<DirectedEdge> edges(edge_set.begin(), edge_set.end());

  std::vector<double> effects(edges.size(), 0.0);
  std::vector<std::exception_ptr> errors(edges.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::size_t i = 0; i < edges.size(); ++i) {
    try {
      effects[i] = edge_effect(matrix, edges[i].from, edges[i].to);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateTreatment && e.code() != ErrorCode::NoMatches) {
        errors[i] = std::current_exception();
      }
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::map<DirectedEdge, double> cache;
  for (std::size_t i = 0; i < edges.size(); ++i) cache[edges[i]] = effects[i];
  return combine_strengths(candidates, bic, [&](const DirectedEdge& e) { return cache.at(e); });
}

std::vector<double> timestep_strengths(std::size_t series_length,
                                       const std::vector<Snippet>& snippets,
                                       const std::vector<std::size_t>& assignments,
                                       const StrengthMap& strengths, std::size_t label_node) {
  if (series_length == 0) throw Error(ErrorCode::EmptyInput, "timestep_strengths: empty series");
  if (snippets.size() != assignments.size()) {
    throw Error(ErrorCode::LengthMismatch, "timestep_strengths: one factor per snippet required");
  }
  std::vector<double> zeta(series_length, 0.0);
  for (std::size_t s = 0; s < snippets.size(); ++s) {
    const auto& sub = snippets[s].subsequence;
    const double w = std::abs(strengths.strength(assignments[s], label_node));
    const std::size_t end = std::min(series_length, sub.offset() + sub.length);
    for (std::size_t i = sub.offset(); i < end; ++i) zeta[i] = std::max(zeta[i], w);
  }
  const double total = std::accumulate(zeta.begin(), zeta.end(), 0.0);
  if (total <= 0.0) {
    std::fill(zeta.begin(), zeta.end(), 1.0 / static_cast<double>(series_length));
  } else {
    for (double& z : zeta) z /= total;
  }
  return zeta;
}

}  // namespace mcns
