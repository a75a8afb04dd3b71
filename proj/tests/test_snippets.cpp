#include <numeric>
#include <random>

#include "doctest.h"
#include "mcns/error.hpp"
#include "mcns/kernels.hpp"
#include "mcns/snippets.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace mcns;

namespace {

TimeSeries noisy_walk(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  TimeSeries t;
  t.id = "walk";
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) t.values.push_back(acc += g(rng));
  return t;
}

}  // namespace

TEST_CASE("distance profile is zero at the query's own position") {
  const auto t = noisy_walk(300, 1);
  const auto q = subsequence_at(t, 41, 25);
  const auto p = subseq_distance_profile(q, t);
  REQUIRE(p.values.size() == 276);
  CHECK(p.values[40] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("constant query gives a finite profile") {
  const auto t = noisy_walk(100, 2);
  Subsequence q;
  q.values.assign(10, 4.2);
  q.length = 10;
  for (double v : subseq_distance_profile(q, t).values) {
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
  }
}

TEST_CASE("distance profile equals brute-force z-normalised distances") {
  const auto t = noisy_walk(60, 3);
  const auto q = subsequence_at(t, 17, 4);
  const auto p = subseq_distance_profile(q, t);
  for (std::size_t i = 0; i + 4 <= t.size(); ++i) {
    CHECK(p.values[i] == doctest::Approx(oracle::znorm_distance(q.values, oracle::slice(t.values, i, 4))).epsilon(1e-9));
  }
  Subsequence big;
  big.values.assign(61, 0.0);
  CHECK_THROWS_AS(subseq_distance_profile(big, t), Error);
}

TEST_CASE("two-regime series yields one snippet per regime") {
  std::mt19937_64 rng(5);
  const auto t = synth::two_regime(1000, 50, 0.05, rng);
  const auto s = discover_snippets(t, 2, 50);
  REQUIRE(s.size() == 2);
  const bool first_half0 = s[0].subsequence.offset() + 50 <= 500;
  const bool first_half1 = s[1].subsequence.offset() + 50 <= 500;
  CHECK(first_half0 != first_half1);
  for (const auto& sn : s) CHECK(std::abs(sn.coverage - 0.5) <= 0.1);
}

TEST_CASE("single snippet equals the exhaustive minimum-area candidate") {
  const auto t = noisy_walk(160, 6);
  const std::size_t l = 16;
  const auto sub = kernels::mpdist_sublength(l);
  std::size_t best = 0;
  double best_area = 1e300;
  for (std::size_t c = 0; c + l <= t.size(); c += l) {
    double area = 0.0;
    for (std::size_t i = 0; i + l <= t.size(); ++i) {
      area += oracle::mpdist(oracle::slice(t.values, c, l), oracle::slice(t.values, i, l), sub, 0.05);
    }
    if (area < best_area - 1e-9) {
      best_area = area;
      best = c;
    }
  }
  const auto s = discover_snippets(t, 1, l);
  REQUIRE(s.size() == 1);
  CHECK(s[0].subsequence.offset() == best);
  CHECK(s[0].coverage == doctest::Approx(1.0));
}

TEST_CASE("snippet selection is a greedy prefix with decreasing area") {
  const auto t = noisy_walk(400, 7);
  const std::size_t l = 20;
  const auto all = discover_snippets(t, 6, l);
  for (std::size_t j = 1; j <= 6; ++j) {
    const auto prefix = discover_snippets(t, j, l);
    for (std::size_t r = 0; r < j; ++r) CHECK(prefix[r].subsequence == all[r].subsequence);
  }
  const auto sp = snippet_profiles(t, l);
  std::vector<double> running(t.size() - l + 1, 1e300);
  double last = 1e300;
  for (const auto& s : all) {
    const auto c = std::find(sp.candidate_starts.begin(), sp.candidate_starts.end(), s.subsequence.offset()) -
                   sp.candidate_starts.begin();
    for (std::size_t i = 0; i < running.size(); ++i) running[i] = std::min(running[i], sp.profiles[c][i]);
    const double area = std::accumulate(running.begin(), running.end(), 0.0);
    CHECK(area <= last);
    last = area;
  }
}

TEST_CASE("snippets are deterministic with contiguous ranks and bounded coverage") {
  const auto t = noisy_walk(500, 8);
  const auto a = discover_snippets(t, 5, 25);
  CHECK(a == discover_snippets(t, 5, 25));
  SnippetOptions serial;
  serial.parallel = false;
  CHECK(a == discover_snippets(t, 5, 25, serial));
  double cov = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) {
    CHECK(a[r].rank == r + 1);
    CHECK(a[r].subsequence.values == oracle::slice(t.values, a[r].subsequence.offset(), 25));
    cov += a[r].coverage;
  }
  CHECK(cov <= 1.0 + 1e-12);
}

TEST_CASE("snippet discovery preconditions") {
  const auto t = noisy_walk(99, 9);
  CHECK_THROWS_WITH_AS(discover_snippets(t, 1, 50), doctest::Contains("shorter"), Error);
  try {
    discover_snippets(t, 5, 20);
    FAIL("expected KTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::KTooLarge);
  }
  try {
    discover_snippets(t, 1, 50);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SeriesTooShort);
  }
}
