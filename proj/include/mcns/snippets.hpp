#pragma once

#include <cstddef>
#include <vector>

#include "mcns/series.hpp"

namespace mcns {

struct Snippet {
  Subsequence subsequence;
  double coverage = 0.0;  // fraction of windows whose nearest snippet is this one
  std::size_t rank = 1;   // 1-based selection order

  bool operator==(const Snippet&) const = default;
};

struct DistanceProfile {
  std::vector<double> values;
};

struct SnippetOptions {
  // Order statistic used by the snippet profile, as a fraction of 2l.
  double mpdist_percentage = 0.05;
  bool parallel = true;
};

// Z-normalised Euclidean distance from the query to every equal-length window.
DistanceProfile subseq_distance_profile(const Subsequence& query, const TimeSeries& series);

// Greedy snippet selection over the non-overlapping l-grid of candidates.
std::vector<Snippet> discover_snippets(const TimeSeries& series, std::size_t k, std::size_t l,
                                       const SnippetOptions& options = {});

// Full per-candidate profile matrix (candidate starts are 1-based in the
// returned Subsequence metadata). Exposed for tests and diagnostics.
struct SnippetProfiles {
  std::vector<std::size_t> candidate_starts;  // 0-based offsets
  std::vector<std::vector<double>> profiles;
};
SnippetProfiles snippet_profiles(const TimeSeries& series, std::size_t l,
                                 const SnippetOptions& options = {});

}  // namespace mcns
