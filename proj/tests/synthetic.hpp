#pragma once

// Seeded synthetic data shared by the unit tests, the acceptance gate and the
// CLI smoke test.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "mcns/encode.hpp"
#include "mcns/series.hpp"

namespace mcns::synth {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline std::vector<double> sine(std::size_t n, double period, double phase = 0.0) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = std::sin(kTwoPi * static_cast<double>(i) / period + phase);
  return v;
}

inline void add_noise(std::vector<double>& v, double sd, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, sd);
  for (double& x : v) x += g(rng);
}

inline double square_wave(double phase01) { return phase01 < 0.5 ? 1.0 : -1.0; }
inline double sawtooth(double phase01) { return 2.0 * phase01 - 1.0; }

// First half sine, second half square wave; random phase per regime.
inline TimeSeries two_regime(std::size_t n, std::size_t period, double noise, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double p1 = u(rng), p2 = u(rng);
  TimeSeries t;
  t.id = "two-regime";
  t.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ph = std::fmod(static_cast<double>(i) / static_cast<double>(period) + (i < n / 2 ? p1 : p2), 1.0);
    t.values[i] = i < n / 2 ? std::sin(kTwoPi * ph) : square_wave(ph);
  }
  add_noise(t.values, noise, rng);
  return t;
}

// `copies` circularly shifted, noisy versions of each of two templates
// (sine and square over one period of length m). Returns sequences and truth.
inline void shifted_templates(std::size_t copies, std::size_t m, std::size_t max_shift, double noise,
                              std::mt19937_64& rng, std::vector<std::vector<double>>& out,
                              std::vector<std::size_t>& truth) {
  std::uniform_int_distribution<std::size_t> shift(0, max_shift);
  for (std::size_t c = 0; c < 2 * copies; ++c) {
    const std::size_t cls = c % 2;
    const std::size_t s = shift(rng);
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double ph = static_cast<double>((i + s) % m) / static_cast<double>(m);
      v[i] = cls == 0 ? std::sin(kTwoPi * ph) : square_wave(ph);
    }
    add_noise(v, noise, rng);
    out.push_back(std::move(v));
    truth.push_back(cls);
  }
}

// Series of `cycles` back-to-back cycles of length l. Factor A (square wave)
// fills cycles 1-2 with probability 1/2; B (sawtooth) fills cycles 5-6 and
// copies A with flip probability `flip`; the label copies B likewise.
inline Dataset planted_dataset(std::size_t rows, std::size_t l, std::size_t cycles, double flip,
                               std::mt19937_64& rng, double noise = 0.05) {
  std::bernoulli_distribution coin(0.5), flipper(flip);
  std::normal_distribution<double> g(0.0, noise);
  std::vector<TimeSeries> out;
  for (std::size_t r = 0; r < rows; ++r) {
    const bool a = coin(rng);
    const bool b = a != flipper(rng);
    const bool y = b != flipper(rng);
    TimeSeries t;
    t.id = std::to_string(r);
    t.label = y ? 1 : 0;
    for (std::size_t c = 0; c < cycles; ++c) {
      for (std::size_t j = 0; j < l; ++j) {
        const double ph = static_cast<double>(j) / static_cast<double>(l);
        double v = std::sin(kTwoPi * ph);
        if (a && (c == 1 || c == 2)) v = square_wave(ph);
        else if (b && (c == 5 || c == 6)) v = sawtooth(ph);
        t.values.push_back(v + g(rng));
      }
    }
    out.push_back(std::move(t));
  }
  return make_dataset(std::move(out));
}

// Daily-load-like curves: 6 days of 24 samples. A warm-season morning ramp or
// a cold-season evening spike appears in some days, tied noisily to the class.
inline Dataset powercons_like(std::size_t rows, std::mt19937_64& rng) {
  constexpr std::size_t day = 24, days = 6;
  std::bernoulli_distribution coin(0.5), keep(0.9), day_has(0.5);
  std::normal_distribution<double> g(0.0, 0.08);
  std::vector<TimeSeries> out;
  for (std::size_t r = 0; r < rows; ++r) {
    const bool cold = coin(rng);
    const bool ramp = cold ? !keep(rng) : keep(rng);
    const bool spike = cold ? keep(rng) : !keep(rng);
    TimeSeries t;
    t.id = std::to_string(r);
    t.label = cold ? 1 : 0;
    std::size_t ramp_day = 1 + (r % 2), spike_day = 3 + (r % 3);
    for (std::size_t d = 0; d < days; ++d) {
      const bool here_ramp = ramp && (d == ramp_day || (d == ramp_day + 1 && day_has(rng)));
      const bool here_spike = spike && (d == spike_day || (d + 1 == spike_day && day_has(rng)));
      for (std::size_t h = 0; h < day; ++h) {
        const double ph = static_cast<double>(h) / day;
        double v = 0.6 * std::sin(kTwoPi * ph - 1.2);
        if (here_ramp) v = ph < 0.5 ? 2.0 * ph * 2.0 - 1.0 : -1.0;
        if (here_spike) v = std::exp(-std::pow((ph - 0.75) / 0.06, 2.0)) * 2.0 - 0.6;
        t.values.push_back(v + g(rng));
      }
    }
    out.push_back(std::move(t));
  }
  return make_dataset(std::move(out));
}

// Factor matrix for the binary chain A -> B -> label.
inline FactorMatrix chain_matrix(std::size_t rows, double flip, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5), flipper(flip);
  FactorMatrix m;
  m.factor_ids = {0, 1};
  m.factor_bits.assign(2, std::vector<std::uint8_t>(rows));
  m.label_column = std::vector<int>(rows);
  m.class_count = 2;
  for (std::size_t r = 0; r < rows; ++r) {
    const bool a = coin(rng);
    const bool b = a != flipper(rng);
    const bool y = b != flipper(rng);
    m.row_ids.push_back(std::to_string(r));
    m.factor_bits[0][r] = a;
    m.factor_bits[1][r] = b;
    (*m.label_column)[r] = y;
  }
  return m;
}

// Columns Z, T, Y: Z -> T, Z -> Y, T -> Y with a direct effect `effect` on
// P(Y = 1) and confounding strength `conf` on both T and Y.
inline FactorMatrix confounded_matrix(std::size_t rows, double effect, double conf, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FactorMatrix m;
  m.factor_ids = {0, 1, 2};
  m.factor_bits.assign(3, std::vector<std::uint8_t>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const bool z = u(rng) < 0.5;
    const bool t = u(rng) < 0.3 + conf * z;
    const bool y = u(rng) < 0.2 + effect * t + conf * z;
    m.row_ids.push_back(std::to_string(r));
    m.factor_bits[0][r] = z;
    m.factor_bits[1][r] = t;
    m.factor_bits[2][r] = y;
  }
  return m;
}

}  // namespace mcns::synth
