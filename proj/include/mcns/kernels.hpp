#pragma once

// Hot loops of the pipeline. Every kernel has a serial reference under
// kernels::serial and an OpenMP version under kernels::parallel; both evaluate
// the same per-element expression, so their outputs are bitwise identical.

#include <cstddef>
#include <span>
#include <vector>

namespace mcns::kernels {

struct WindowStats {
  std::vector<double> mean;
  std::vector<double> sd;
};

// Mean and population SD of every length-m window of x.
WindowStats window_stats(std::span<const double> x, std::size_t m);

// Z-normalised Euclidean distance between a z-normalised query and the window
// of x starting at pos. Constant windows normalise to all zeros.
double znorm_distance_at(std::span<const double> query_hat, std::span<const double> x,
                         std::size_t pos, double mean, double sd);

struct SbdResult {
  double distance = 0.0;
  long shift = 0;
};

// Shape-based distance between two already z-normalised sequences of equal
// length. shift s means y is best explained as x delayed by s samples.
SbdResult sbd_normalized(std::span<const double> x, std::span<const double> y);

struct Nearest {
  std::size_t index = 0;
  double distance = 0.0;
  long shift = 0;
};

// Sub-window length used inside the snippet profile for snippet length l.
std::size_t mpdist_sublength(std::size_t l);

// Sliding minimum of width w over v; result has v.size() - w + 1 entries.
std::vector<double> sliding_min(std::span<const double> v, std::size_t w);

using ProfileMatrix = std::vector<std::vector<double>>;

namespace serial {

std::vector<double> distance_profile(std::span<const double> query, std::span<const double> x);

// One MPdist profile per candidate start (0-based) over all n - l + 1 windows.
ProfileMatrix snippet_profiles(std::span<const double> x, std::size_t l,
                               std::span<const std::size_t> candidates, double percentage);

std::vector<Nearest> nearest_centroid(const std::vector<std::vector<double>>& items,
                                      const std::vector<std::vector<double>>& centroids);

}  // namespace serial

namespace parallel {

std::vector<double> distance_profile(std::span<const double> query, std::span<const double> x);

ProfileMatrix snippet_profiles(std::span<const double> x, std::size_t l,
                               std::span<const std::size_t> candidates, double percentage);

std::vector<Nearest> nearest_centroid(const std::vector<std::vector<double>>& items,
                                      const std::vector<std::vector<double>>& centroids);

}  // namespace parallel

}  // namespace mcns::kernels
