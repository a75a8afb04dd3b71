#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mcns {

inline constexpr double kVarianceEpsilon = 1e-12;
inline constexpr double kSpectralEpsilon = 1e-9;

struct TimeSeries {
  std::string id;
  std::vector<double> values;
  std::optional<int> label;

  std::size_t size() const noexcept { return values.size(); }
};

// A window T[start, start + length). `start` is 1-based.
struct Subsequence {
  std::string source;
  std::size_t start = 1;
  std::size_t length = 0;
  std::vector<double> values;

  std::size_t offset() const noexcept { return start - 1; }
  bool operator==(const Subsequence&) const = default;
};

struct Dataset {
  std::vector<TimeSeries> series;
  std::size_t class_count = 0;
  // Original label tokens, indexed by the contiguous label id.
  std::vector<std::string> label_names;

  bool empty() const noexcept { return series.empty(); }
  std::size_t size() const noexcept { return series.size(); }
  bool labeled() const noexcept { return class_count > 0; }

  // Throws InvalidArgument when ids repeat, samples are non-finite or the
  // label set disagrees with class_count.
  void validate() const;
};

// Builds a Dataset from raw series and recomputes class_count from the labels.
Dataset make_dataset(std::vector<TimeSeries> series);

std::vector<double> znormalize(std::span<const double> x);

// round(n / b) for the strongest non-DC frequency bin b of the mean-removed series.
std::size_t dominant_period(const TimeSeries& series);

// Maximum dominant period over the dataset.
std::size_t unified_length(const Dataset& dataset);

std::vector<Subsequence> subsequences(const TimeSeries& series, std::size_t m);

Subsequence subsequence_at(const TimeSeries& series, std::size_t start, std::size_t m);

}  // namespace mcns
