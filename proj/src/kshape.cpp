#include "mcns/kshape.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mcns/error.hpp"
#include "mcns/series.hpp"

namespace mcns {

namespace {

constexpr double kPowerTolerance = 1e-8;
constexpr std::size_t kPowerMaxSteps = 1000;

std::vector<double> safe_znormalize(std::span<const double> x) {
  return x.empty() ? std::vector<double>{} : znormalize(x);
}

bool all_zero(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; });
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void normalize_unit(std::vector<double>& v) {
  const double norm = std::sqrt(dot(v, v));
  if (norm > 0.0) {
    for (double& x : v) x /= norm;
  }
}

void center(std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

}  // namespace

SbdResult sbd(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, "sbd: lengths " + std::to_string(x.size()) + " and " +
                                               std::to_string(y.size()) + " differ");
  }
  if (x.empty()) return SbdResult{0.0, 0};
  return kernels::sbd_normalized(znormalize(x), znormalize(y));
}

std::vector<double> shift_sequence(std::span<const double> x, long shift) {
  const long m = static_cast<long>(x.size());
  std::vector<double> out(x.size(), 0.0);
  for (long i = 0; i < m; ++i) {
    const long src = i - shift;
    if (src >= 0 && src < m) out[i] = x[src];
  }
  return out;
}

std::vector<double> shape_extract(const std::vector<std::vector<double>>& members,
                                  std::span<const double> current_centroid) {
  if (members.empty()) throw Error(ErrorCode::EmptyCluster, "shape_extract: empty cluster");
  const std::size_t m = members.front().size();
  for (const auto& x : members) {
    if (x.size() != m) throw Error(ErrorCode::LengthMismatch, "shape_extract: ragged members");
  }
  if (current_centroid.size() != m) {
    throw Error(ErrorCode::LengthMismatch, "shape_extract: centroid length mismatch");
  }

  const bool align = !all_zero(current_centroid);
  const auto ref = align ? znormalize(current_centroid) : std::vector<double>(m, 0.0);

  std::vector<std::vector<double>> aligned;
  aligned.reserve(members.size());
  for (const auto& x : members) {
    auto xz = znormalize(x);
    if (align) {
      // Member ≈ centroid delayed by shift; undo the delay.
      const auto r = kernels::sbd_normalized(ref, xz);
      xz = znormalize(shift_sequence(xz, -r.shift));
    }
    aligned.push_back(std::move(xz));
  }

  // M = Q^T S Q with S = sum x x^T and Q the centring projection.
  std::vector<std::vector<double>> centred = aligned;
  for (auto& v : centred) center(v);
  std::vector<double> mat(m * m, 0.0);
  for (const auto& v : centred) {
    for (std::size_t i = 0; i < m; ++i) {
      const double vi = v[i];
      if (vi == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) mat[i * m + j] += vi * v[j];
    }
  }

  std::vector<double> mean(m, 0.0);
  for (const auto& v : aligned) {
    for (std::size_t i = 0; i < m; ++i) mean[i] += v[i];
  }
  for (double& v : mean) v /= static_cast<double>(aligned.size());

  std::vector<double> vec = mean;
  center(vec);
  if (all_zero(vec)) {
    for (std::size_t i = 0; i < m; ++i) vec[i] = static_cast<double>(i) + 1.0;
    center(vec);
  }
  normalize_unit(vec);

  std::vector<double> next(m);
  for (std::size_t step = 0; step < kPowerMaxSteps; ++step) {
    for (std::size_t i = 0; i < m; ++i) next[i] = dot(std::span(mat).subspan(i * m, m), vec);
    const double norm = std::sqrt(dot(next, next));
    if (norm <= 0.0) break;
    for (double& x : next) x /= norm;
    double diff = 0.0;
    for (std::size_t i = 0; i < m; ++i) diff = std::max(diff, std::abs(next[i] - vec[i]));
    vec.swap(next);
    if (diff < kPowerTolerance) break;
  }

  if (dot(vec, mean) < 0.0) {
    for (double& x : vec) x = -x;
  }
  return znormalize(vec);
}

namespace {

KShapeResult kshape_once(const std::vector<std::vector<double>>& normed, std::size_t n,
                         std::uint64_t seed, const KShapeOptions& options);

}  // namespace

KShapeResult kshape(const std::vector<std::vector<double>>& sequences, std::size_t n,
                    std::uint64_t seed, const KShapeOptions& options) {
  if (n == 0 || n > sequences.size()) {
    throw Error(ErrorCode::TooFewSnippets, "kshape: cannot form " + std::to_string(n) +
                                               " clusters from " +
                                               std::to_string(sequences.size()) + " sequences");
  }
  const std::size_t m = sequences.front().size();
  std::vector<std::vector<double>> normed;
  normed.reserve(sequences.size());
  for (const auto& s : sequences) {
    if (s.size() != m) throw Error(ErrorCode::LengthMismatch, "kshape: ragged input");
    normed.push_back(safe_znormalize(s));
  }

  KShapeResult best;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, options.restarts); ++r) {
    auto res = kshape_once(normed, n, seed + r, options);
    if (r == 0 || res.objective.back() < best.objective.back()) best = std::move(res);
  }
  return best;
}

namespace {

KShapeResult kshape_once(const std::vector<std::vector<double>>& normed, std::size_t n,
                         std::uint64_t seed, const KShapeOptions& options) {
  const std::size_t m = normed.front().size();
  std::mt19937_64 rng(seed);
  KShapeResult res;
  res.assignment.resize(normed.size());
  for (auto& a : res.assignment) a = static_cast<std::size_t>(rng() % n);

  std::vector<std::vector<double>> centroids(n, std::vector<double>(m, 0.0));
  for (std::size_t iter = 0; iter < std::max<std::size_t>(1, options.max_iter); ++iter) {
    const auto previous = res.assignment;

    for (std::size_t c = 0; c < n; ++c) {
      std::vector<std::vector<double>> members;
      for (std::size_t i = 0; i < normed.size(); ++i) {
        if (res.assignment[i] == c) members.push_back(normed[i]);
      }
      if (members.empty()) {
        // Reseed with the sequence farthest from its own centroid.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < normed.size(); ++i) {
          const double d = kernels::sbd_normalized(normed[i], centroids[res.assignment[i]]).distance;
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        res.assignment[far] = c;
        centroids[c] = normed[far];
        continue;
      }
      centroids[c] = shape_extract(members, centroids[c]);
    }

    const auto nearest = options.parallel ? kernels::parallel::nearest_centroid(normed, centroids)
                                          : kernels::serial::nearest_centroid(normed, centroids);
    double objective = 0.0;
    for (std::size_t i = 0; i < normed.size(); ++i) {
      res.assignment[i] = nearest[i].index;
      objective += nearest[i].distance;
    }
    res.objective.push_back(objective);
    res.iterations = iter + 1;
    if (res.assignment == previous) {
      res.converged = true;
      break;
    }
  }

  res.clusters.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    res.clusters[c].factor_id = c;
    res.clusters[c].centroid = centroids[c];
  }
  return res;
}

}  // namespace

std::vector<ShapeCluster> kshape_cluster(const std::vector<Snippet>& snippets, std::size_t n,
                                         std::uint64_t seed, const KShapeOptions& options) {
  if (n == 0 || n > snippets.size()) {
    throw Error(ErrorCode::TooFewSnippets, "kshape_cluster: " + std::to_string(n) +
                                               " clusters requested from " +
                                               std::to_string(snippets.size()) + " snippets");
  }
  std::vector<std::vector<double>> seqs;
  seqs.reserve(snippets.size());
  for (const auto& s : snippets) seqs.push_back(s.subsequence.values);
  auto res = kshape(seqs, n, seed, options);
  for (std::size_t i = 0; i < snippets.size(); ++i) {
    res.clusters[res.assignment[i]].members.push_back(
        ClusterMember{snippets[i].subsequence.source, snippets[i].rank});
  }
  return std::move(res.clusters);
}

}  // namespace mcns
