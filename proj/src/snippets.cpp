#include "mcns/snippets.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "mcns/error.hpp"
#include "mcns/kernels.hpp"

namespace mcns {

DistanceProfile subseq_distance_profile(const Subsequence& query, const TimeSeries& series) {
  if (query.values.empty() || query.values.size() > series.size()) {
    throw Error(ErrorCode::WindowTooLong, "distance profile: query longer than series '" +
                                              series.id + "'");
  }
  return DistanceProfile{kernels::parallel::distance_profile(query.values, series.values)};
}

SnippetProfiles snippet_profiles(const TimeSeries& series, std::size_t l,
                                 const SnippetOptions& options) {
  SnippetProfiles out;
  for (std::size_t s = 0; s + l <= series.size(); s += l) out.candidate_starts.push_back(s);
  out.profiles = options.parallel
                     ? kernels::parallel::snippet_profiles(series.values, l, out.candidate_starts,
                                                           options.mpdist_percentage)
                     : kernels::serial::snippet_profiles(series.values, l, out.candidate_starts,
                                                         options.mpdist_percentage);
  return out;
}

std::vector<Snippet> discover_snippets(const TimeSeries& series, std::size_t k, std::size_t l,
                                       const SnippetOptions& options) {
  const std::size_t n = series.size();
  if (l == 0 || n < 2 * l) {
    throw Error(ErrorCode::SeriesTooShort, "discover_snippets: series '" + series.id +
                                               "' of length " + std::to_string(n) +
                                               " is shorter than 2*" + std::to_string(l));
  }
  if (k == 0 || k > n / l) {
    throw Error(ErrorCode::KTooLarge, "discover_snippets: k=" + std::to_string(k) +
                                          " outside [1, " + std::to_string(n / l) + "]");
  }

  const auto sp = snippet_profiles(series, l, options);
  const std::size_t windows = n - l + 1;

  std::vector<double> running(windows, std::numeric_limits<double>::infinity());
  std::vector<bool> used(sp.candidate_starts.size(), false);
  std::vector<std::size_t> chosen;
  for (std::size_t r = 0; r < k; ++r) {
    std::size_t best = 0;
    double best_area = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < sp.candidate_starts.size(); ++c) {
      if (used[c]) continue;
      double area = 0.0;
      for (std::size_t i = 0; i < windows; ++i) area += std::min(running[i], sp.profiles[c][i]);
      // Strict comparison keeps the earliest start on ties.
      if (area < best_area) {
        best_area = area;
        best = c;
      }
    }
    used[best] = true;
    chosen.push_back(best);
    for (std::size_t i = 0; i < windows; ++i) running[i] = std::min(running[i], sp.profiles[best][i]);
  }

  std::vector<std::size_t> nearest_count(chosen.size(), 0);
  for (std::size_t i = 0; i < windows; ++i) {
    std::size_t who = 0;
    for (std::size_t r = 1; r < chosen.size(); ++r) {
      if (sp.profiles[chosen[r]][i] < sp.profiles[chosen[who]][i]) who = r;
    }
    ++nearest_count[who];
  }

  std::vector<Snippet> out;
  out.reserve(chosen.size());
  for (std::size_t r = 0; r < chosen.size(); ++r) {
    Snippet s;
    s.subsequence = subsequence_at(series, sp.candidate_starts[chosen[r]] + 1, l);
    s.coverage = static_cast<double>(nearest_count[r]) / static_cast<double>(windows);
    s.rank = r + 1;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace mcns
