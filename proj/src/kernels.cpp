#include "mcns/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcns/series.hpp"

namespace mcns::kernels {

WindowStats window_stats(std::span<const double> x, std::size_t m) {
  WindowStats st;
  if (m == 0 || m > x.size()) return st;
  const std::size_t count = x.size() - m + 1;
  st.mean.resize(count);
  st.sd.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    double sum = 0.0;
    for (std::size_t u = 0; u < m; ++u) sum += x[i + u];
    const double mean = sum / static_cast<double>(m);
    double ss = 0.0;
    for (std::size_t u = 0; u < m; ++u) ss += (x[i + u] - mean) * (x[i + u] - mean);
    st.mean[i] = mean;
    st.sd[i] = std::sqrt(ss / static_cast<double>(m));
  }
  return st;
}

double znorm_distance_at(std::span<const double> query_hat, std::span<const double> x,
                         std::size_t pos, double mean, double sd) {
  const std::size_t m = query_hat.size();
  double acc = 0.0;
  if (sd > kVarianceEpsilon) {
    for (std::size_t u = 0; u < m; ++u) {
      const double d = query_hat[u] - (x[pos + u] - mean) / sd;
      acc += d * d;
    }
  } else {
    for (std::size_t u = 0; u < m; ++u) acc += query_hat[u] * query_hat[u];
  }
  return std::sqrt(acc);
}

SbdResult sbd_normalized(std::span<const double> x, std::span<const double> y) {
  const long m = static_cast<long>(x.size());
  double nx = 0.0;
  double ny = 0.0;
  for (long i = 0; i < m; ++i) {
    nx += x[i] * x[i];
    ny += y[i] * y[i];
  }
  const bool zx = nx <= 0.0;
  const bool zy = ny <= 0.0;
  if (zx || zy) return SbdResult{(zx && zy) ? 0.0 : 1.0, 0};
  const double denom = std::sqrt(nx) * std::sqrt(ny);

  auto cc = [&](long s) {
    double r = 0.0;
    const long lo = std::max(0L, s);
    const long hi = std::min(m, m + s);
    for (long i = lo; i < hi; ++i) r += x[i - s] * y[i];
    return r / denom;
  };

  // Visit shifts as 0, -1, +1, -2, +2, ... so a strict improvement keeps the
  // smallest |s| and prefers negative shifts on ties.
  double best = cc(0);
  long best_shift = 0;
  for (long k = 1; k < m; ++k) {
    for (long s : {-k, k}) {
      const double v = cc(s);
      if (v > best + 1e-12) {
        best = v;
        best_shift = s;
      }
    }
  }
  return SbdResult{std::clamp(1.0 - best, 0.0, 2.0), best_shift};
}

std::size_t mpdist_sublength(std::size_t l) { return l >= 8 ? l / 2 : l; }

std::vector<double> sliding_min(std::span<const double> v, std::size_t w) {
  if (w == 0 || w > v.size()) return {};
  const std::size_t n = v.size();
  // Block decomposition: prefix minima within blocks and suffix minima within blocks.
  std::vector<double> prefix(n);
  std::vector<double> suffix(n);
  for (std::size_t i = 0; i < n; ++i) {
    prefix[i] = (i % w == 0) ? v[i] : std::min(prefix[i - 1], v[i]);
  }
  for (std::size_t i = n; i-- > 0;) {
    suffix[i] = (i == n - 1 || (i + 1) % w == 0) ? v[i] : std::min(suffix[i + 1], v[i]);
  }
  std::vector<double> out(n - w + 1);
  for (std::size_t i = 0; i + w <= n; ++i) out[i] = std::min(suffix[i], prefix[i + w - 1]);
  return out;
}

namespace {

// MPdist profile of one candidate over every window of length l.
std::vector<double> candidate_profile(std::span<const double> x, std::size_t l, std::size_t start,
                                      const WindowStats& sub_stats, std::size_t sub,
                                      double percentage) {
  const std::size_t n = x.size();
  const std::size_t per_window = l - sub + 1;
  const std::size_t positions = n - sub + 1;
  const std::size_t windows = n - l + 1;

  std::vector<std::vector<double>> dist(per_window, std::vector<double>(positions));
  for (std::size_t j = 0; j < per_window; ++j) {
    const auto q = znormalize(x.subspan(start + j, sub));
    for (std::size_t t = 0; t < positions; ++t) {
      dist[j][t] = znorm_distance_at(q, x, t, sub_stats.mean[t], sub_stats.sd[t]);
    }
  }
  std::vector<double> col_min(positions, std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < per_window; ++j) {
    for (std::size_t t = 0; t < positions; ++t) col_min[t] = std::min(col_min[t], dist[j][t]);
  }
  std::vector<std::vector<double>> row_min(per_window);
  for (std::size_t j = 0; j < per_window; ++j) row_min[j] = sliding_min(dist[j], per_window);

  const std::size_t total = 2 * per_window;
  const auto kth = std::min<std::size_t>(
      static_cast<std::size_t>(std::ceil(percentage * static_cast<double>(2 * l))), total - 1);

  std::vector<double> profile(windows);
  std::vector<double> pool(total);
  for (std::size_t i = 0; i < windows; ++i) {
    for (std::size_t j = 0; j < per_window; ++j) pool[j] = row_min[j][i];
    for (std::size_t u = 0; u < per_window; ++u) pool[per_window + u] = col_min[i + u];
    std::nth_element(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(kth), pool.end());
    profile[i] = pool[kth];
  }
  return profile;
}

Nearest nearest_one(const std::vector<double>& item,
                    const std::vector<std::vector<double>>& centroids) {
  Nearest best{0, std::numeric_limits<double>::infinity(), 0};
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const auto r = sbd_normalized(item, centroids[c]);
    if (r.distance < best.distance) best = Nearest{c, r.distance, r.shift};
  }
  return best;
}

}  // namespace

namespace serial {

std::vector<double> distance_profile(std::span<const double> query, std::span<const double> x) {
  const auto q = znormalize(query);
  const auto st = window_stats(x, query.size());
  std::vector<double> out(st.mean.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = znorm_distance_at(q, x, i, st.mean[i], st.sd[i]);
  }
  return out;
}

ProfileMatrix snippet_profiles(std::span<const double> x, std::size_t l,
                               std::span<const std::size_t> candidates, double percentage) {
  const std::size_t sub = mpdist_sublength(l);
  const auto st = window_stats(x, sub);
  ProfileMatrix out(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    out[c] = candidate_profile(x, l, candidates[c], st, sub, percentage);
  }
  return out;
}

std::vector<Nearest> nearest_centroid(const std::vector<std::vector<double>>& items,
                                      const std::vector<std::vector<double>>& centroids) {
  std::vector<Nearest> out(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) out[i] = nearest_one(items[i], centroids);
  return out;
}

}  // namespace serial

namespace parallel {

std::vector<double> distance_profile(std::span<const double> query, std::span<const double> x) {
  const auto q = znormalize(query);
  const auto st = window_stats(x, query.size());
  const auto count = static_cast<long>(st.mean.size());
  std::vector<double> out(st.mean.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < count; ++i) {
    out[i] = znorm_distance_at(q, x, static_cast<std::size_t>(i), st.mean[i], st.sd[i]);
  }
  return out;
}

ProfileMatrix snippet_profiles(std::span<const double> x, std::size_t l,
                               std::span<const std::size_t> candidates, double percentage) {
  const std::size_t sub = mpdist_sublength(l);
  const auto st = window_stats(x, sub);
  ProfileMatrix out(candidates.size());
  const auto count = static_cast<long>(candidates.size());
#pragma omp parallel for schedule(dynamic)
  for (long c = 0; c < count; ++c) {
    out[c] = candidate_profile(x, l, candidates[c], st, sub, percentage);
  }
  return out;
}

std::vector<Nearest> nearest_centroid(const std::vector<std::vector<double>>& items,
                                      const std::vector<std::vector<double>>& centroids) {
  std::vector<Nearest> out(items.size());
  const auto count = static_cast<long>(items.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < count; ++i) out[i] = nearest_one(items[i], centroids);
  return out;
}

}  // namespace parallel

}  // namespace mcns::kernels
