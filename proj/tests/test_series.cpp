#include <random>

#include "doctest.h"
#include "mcns/error.hpp"
#include "mcns/series.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace mcns;

namespace {

TimeSeries make(std::vector<double> v, std::string id = "s") {
  TimeSeries t;
  t.id = std::move(id);
  t.values = std::move(v);
  return t;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an mcns::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("znormalize of a short ramp") {
  const auto z = znormalize(std::vector<double>{1, 2, 3});
  CHECK(z[0] == doctest::Approx(-1.2247).epsilon(1e-4));
  CHECK(z[1] == doctest::Approx(0.0));
  CHECK(z[2] == doctest::Approx(1.2247).epsilon(1e-4));
}

TEST_CASE("znormalize maps constant input to zeros and rejects empty input") {
  CHECK(znormalize(std::vector<double>{5, 5, 5, 5}) == std::vector<double>(4, 0.0));
  CHECK(code_of([] { znormalize(std::vector<double>{}); }) == ErrorCode::EmptyInput);
}

TEST_CASE("znormalize is idempotent and gives unit population SD") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(3.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(37);
    for (double& v : x) v = g(rng);
    const auto z = znormalize(x);
    const auto zz = znormalize(z);
    double mean = 0.0, ss = 0.0;
    for (double v : z) mean += v;
    mean /= z.size();
    for (double v : z) ss += (v - mean) * (v - mean);
    CHECK(mean == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(std::sqrt(ss / z.size()) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < z.size(); ++i) CHECK(zz[i] == doctest::Approx(z[i]).epsilon(1e-12));
  }
}

TEST_CASE("dominant_period of a pure sine with period 50") {
  const auto x = synth::sine(1000, 50.0);
  CHECK(oracle::dft_period(x) == 50);
  CHECK(dominant_period(make(x)) == 50);
}

TEST_CASE("dominant_period picks the stronger of two components") {
  auto x = synth::sine(1000, 50.0);
  const auto y = synth::sine(1000, 13.0);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += 0.2 * y[i];
  CHECK(oracle::dft_period(x) == 50);
  CHECK(dominant_period(make(x)) == 50);
}

TEST_CASE("dominant_period error paths") {
  CHECK(code_of([] { dominant_period(make(std::vector<double>(100, 3.0))); }) ==
        ErrorCode::NoDominantFrequency);
  CHECK(code_of([] { dominant_period(make({1, 2, 3, 4, 5, 6, 7})); }) == ErrorCode::TooShort);
}

TEST_CASE("dominant_period matches the DFT oracle on noisy series") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> period(5, 120);
  for (int trial = 0; trial < 25; ++trial) {
    auto x = synth::sine(600, period(rng), 0.3 * trial);
    synth::add_noise(x, 0.5, rng);
    CHECK(dominant_period(make(x)) == oracle::dft_period(x));
  }
}

TEST_CASE("dominant_period of integer divisor periods is exact") {
  for (std::size_t p : {4u, 5u, 8u, 10u, 20u, 25u, 40u, 50u, 100u, 125u, 200u, 250u, 500u}) {
    CAPTURE(p);
    CHECK(dominant_period(make(synth::sine(1000, static_cast<double>(p), 0.4))) == p);
  }
}

TEST_CASE("dominant_period is amplitude invariant") {
  std::mt19937_64 rng(3);
  auto x = synth::sine(512, 37.0);
  synth::add_noise(x, 0.4, rng);
  const auto base = dominant_period(make(x));
  for (double c : {1e-6, 0.3, 7.0, 1e5}) {
    std::vector<double> y = x;
    for (double& v : y) v *= c;
    CHECK(dominant_period(make(y)) == base);
  }
}

TEST_CASE("unified_length takes the maximum dominant period") {
  std::vector<TimeSeries> s;
  int id = 0;
  for (double p : {50.0, 30.0, 42.0}) s.push_back(make(synth::sine(1000, p), std::to_string(id++)));
  CHECK(dominant_period(s[1]) == 30);
  CHECK(dominant_period(s[2]) == 42);
  CHECK(unified_length(make_dataset(s)) == 50);
  CHECK(unified_length(make_dataset({make(synth::sine(1000, 25.0))})) == 25);
  CHECK(code_of([] { unified_length(Dataset{}); }) == ErrorCode::EmptyDataset);
}

TEST_CASE("unified_length names the series without a dominant frequency") {
  const auto ds = make_dataset({make(synth::sine(200, 20.0), "ok"), make(std::vector<double>(200, 1.0), "flat")});
  try {
    unified_length(ds);
    FAIL("expected NoDominantFrequency");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoDominantFrequency);
    CHECK(std::string(e.what()).find("flat") != std::string::npos);
  }
}

TEST_CASE("subsequences enumerates every window in start order") {
  const auto t = make({1, 2, 3, 4, 5});
  const auto w = subsequences(t, 3);
  REQUIRE(w.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(w[i].start == i + 1);
    CHECK(w[i].values == std::vector<double>(t.values.begin() + i, t.values.begin() + i + 3));
  }
  const auto whole = subsequences(t, 5);
  REQUIRE(whole.size() == 1);
  CHECK(whole[0].values == t.values);
  CHECK(code_of([&] { subsequences(t, 6); }) == ErrorCode::WindowTooLong);
}

TEST_CASE("subsequence windows tile the series") {
  const auto t = make(synth::sine(23, 7.0));
  for (std::size_t m = 1; m <= t.size(); ++m) {
    std::vector<int> hit(t.size(), 0);
    for (const auto& s : subsequences(t, m)) {
      for (std::size_t i = s.offset(); i < s.offset() + s.length; ++i) hit[i] = 1;
    }
    CHECK(std::count(hit.begin(), hit.end(), 1) == static_cast<long>(t.size()));
  }
}

TEST_CASE("dataset validation") {
  auto a = make({1, 2, 3}, "a");
  auto b = make({1, 2, 3}, "a");
  CHECK(code_of([&] { make_dataset({a, b}).validate(); }) == ErrorCode::InvalidArgument);
  a.label = 0;
  b.id = "b";
  b.label = 1;
  const auto ds = make_dataset({a, b});
  CHECK(ds.class_count == 2);
  CHECK_NOTHROW(ds.validate());
}
