#include "mcns/series.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numeric>
#include <set>
#include <unordered_set>

#include "mcns/error.hpp"

namespace mcns {

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const noexcept {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
};

// One-sided power spectrum |X_b|^2 for b = 0..n/2.
std::vector<double> power_spectrum(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  const int bins = n / 2 + 1;
  std::unique_ptr<double, FftwFree> in(fftw_alloc_real(x.size()));
  std::unique_ptr<fftw_complex, FftwFree> out(fftw_alloc_complex(bins));
  std::unique_ptr<fftw_plan_s, PlanDeleter> plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan.reset(fftw_plan_dft_r2c_1d(n, in.get(), out.get(), FFTW_ESTIMATE));
  }
  std::copy(x.begin(), x.end(), in.get());
  fftw_execute(plan.get());

  std::vector<double> power(bins);
  for (int b = 0; b < bins; ++b) {
    power[b] = out.get()[b][0] * out.get()[b][0] + out.get()[b][1] * out.get()[b][1];
  }
  return power;
}

double population_sd(std::span<const double> x, double mean) {
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size()));
}

}  // namespace

void Dataset::validate() const {
  std::unordered_set<std::string> ids;
  std::set<int> labels;
  for (const auto& s : series) {
    if (!ids.insert(s.id).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate series id '" + s.id + "'");
    }
    if (s.values.empty()) {
      throw Error(ErrorCode::EmptyInput, "series '" + s.id + "' is empty");
    }
    for (double v : s.values) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::InvalidArgument, "series '" + s.id + "' has a non-finite sample");
      }
    }
    if (s.label) {
      if (*s.label < 0) {
        throw Error(ErrorCode::InvalidArgument, "series '" + s.id + "' has a negative label");
      }
      labels.insert(*s.label);
    }
  }
  if (labels.size() != class_count) {
    throw Error(ErrorCode::InvalidArgument, "class count disagrees with observed labels");
  }
}

Dataset make_dataset(std::vector<TimeSeries> series) {
  Dataset ds;
  ds.series = std::move(series);
  std::set<int> labels;
  for (const auto& s : ds.series) {
    if (s.label) labels.insert(*s.label);
  }
  ds.class_count = labels.size();
  for (int l : labels) ds.label_names.push_back(std::to_string(l));
  return ds;
}

std::vector<double> znormalize(std::span<const double> x) {
  if (x.empty()) throw Error(ErrorCode::EmptyInput, "znormalize: empty input");
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  const double sd = population_sd(x, mean);
  std::vector<double> out(x.size(), 0.0);
  if (sd > kVarianceEpsilon) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean) / sd;
  }
  return out;
}

std::size_t dominant_period(const TimeSeries& series) {
  const std::size_t n = series.size();
  if (n < 8) {
    throw Error(ErrorCode::TooShort, "dominant_period: series '" + series.id + "' shorter than 8");
  }
  const double mean =
      std::accumulate(series.values.begin(), series.values.end(), 0.0) / static_cast<double>(n);
  if (population_sd(series.values, mean) <= kVarianceEpsilon) {
    throw Error(ErrorCode::NoDominantFrequency,
                "dominant_period: series '" + series.id + "' is constant");
  }
  std::vector<double> centered(n);
  std::transform(series.values.begin(), series.values.end(), centered.begin(),
                 [mean](double v) { return v - mean; });

  const auto power = power_spectrum(centered);
  const double total = std::accumulate(power.begin() + 1, power.end(), 0.0);

  // Bins implying a period outside [4, n/2] are excluded.
  const std::size_t lo = 2;
  const std::size_t hi = n / 4;
  std::size_t best = 0;
  double best_power = -1.0;
  for (std::size_t b = lo; b <= hi && b < power.size(); ++b) {
    if (power[b] > best_power) {
      best_power = power[b];
      best = b;
    }
  }
  if (best == 0 || !(total > 0.0) || best_power < kSpectralEpsilon * total) {
    throw Error(ErrorCode::NoDominantFrequency,
                "dominant_period: no spectral peak in series '" + series.id + "'");
  }
  const auto period = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) / static_cast<double>(best)));
  return std::clamp<std::size_t>(period, 4, n / 2);
}

std::size_t unified_length(const Dataset& dataset) {
  if (dataset.empty()) throw Error(ErrorCode::EmptyDataset, "unified_length: empty dataset");
  std::size_t best = 0;
  for (const auto& s : dataset.series) {
    try {
      best = std::max(best, dominant_period(s));
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " (series id " + s.id + ")");
    }
  }
  return best;
}

Subsequence subsequence_at(const TimeSeries& series, std::size_t start, std::size_t m) {
  if (m == 0 || m > series.size()) {
    throw Error(ErrorCode::WindowTooLong, "window length " + std::to_string(m) +
                                              " invalid for series of length " +
                                              std::to_string(series.size()));
  }
  if (start < 1 || start > series.size() - m + 1) {
    throw Error(ErrorCode::InvalidArgument, "window start out of range");
  }
  Subsequence sub;
  sub.source = series.id;
  sub.start = start;
  sub.length = m;
  sub.values.assign(series.values.begin() + static_cast<std::ptrdiff_t>(start - 1),
                    series.values.begin() + static_cast<std::ptrdiff_t>(start - 1 + m));
  return sub;
}

std::vector<Subsequence> subsequences(const TimeSeries& series, std::size_t m) {
  if (m == 0 || m > series.size()) {
    throw Error(ErrorCode::WindowTooLong, "window length " + std::to_string(m) +
                                              " invalid for series of length " +
                                              std::to_string(series.size()));
  }
  std::vector<Subsequence> out;
  out.reserve(series.size() - m + 1);
  for (std::size_t i = 1; i + m - 1 <= series.size(); ++i) out.push_back(subsequence_at(series, i, m));
  return out;
}

}  // namespace mcns
