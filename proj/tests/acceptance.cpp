// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>

#include "mcns/causal_graph.hpp"
#include "mcns/io.hpp"
#include "mcns/kshape.hpp"
#include "mcns/series.hpp"
#include "mcns/snippets.hpp"
#include "mcns/strength.hpp"
#include "mcns/structure.hpp"
#include "synthetic.hpp"

using namespace mcns;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances and trial counts.
constexpr double kPeriodNoiseSd = 0.3;
constexpr int kPeriodTrials = 100;
constexpr double kPeriodPassRate = 0.95;
constexpr double kPeriodSeconds = 1.0;

constexpr int kSnippetTrials = 50;
constexpr double kCoverageTol = 0.1;
constexpr double kSnippetSeconds = 5.0;

constexpr int kPurityTrials = 50;
constexpr double kPurityPassRate = 0.95;

constexpr int kCausalRuns = 50;
constexpr std::size_t kCausalRows = 2000;
constexpr double kCausalFlip = 0.1;
constexpr double kSkeletonPassRate = 0.90;

constexpr int kAteRuns = 50;
constexpr double kAteTol = 0.05;
constexpr double kNaiveMinError = 0.1;
constexpr double kAtePassRate = 0.90;
constexpr double kAteSeconds = 10.0;

constexpr int kBootstrapCases = 20;
constexpr std::size_t kBootstrapB = 10000;

constexpr int kPruneCases = 1000;
constexpr int kCirCases = 1000;
constexpr double kPrunedFractionMin = 0.5;

constexpr int kDeterminismRepeats = 20;

int failures = 0;

void report(bool pass, const std::string& name, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void period_recovery() {
  const auto t0 = Clock::now();
  TimeSeries pure{"p", synth::sine(1000, 50.0), std::nullopt};
  const bool exact = dominant_period(pure) == 50;
  int ok = 0;
  for (int s = 0; s < kPeriodTrials; ++s) {
    std::mt19937_64 rng(s);
    TimeSeries t{"n", synth::sine(1000, 50.0), std::nullopt};
    synth::add_noise(t.values, kPeriodNoiseSd, rng);
    ok += dominant_period(t) == 50 ? 1 : 0;
  }
  const double secs = seconds_since(t0);
  report(exact && ok >= kPeriodPassRate * kPeriodTrials && secs < kPeriodSeconds, "period-recovery",
         fmt("pure=%s noisy=%d/%d time=%.3fs", exact ? "50" : "wrong", ok, kPeriodTrials, secs));
}

void snippet_regimes() {
  const auto t0 = Clock::now();
  int ok = 0;
  for (int s = 0; s < kSnippetTrials; ++s) {
    std::mt19937_64 rng(s);
    const auto t = synth::two_regime(1000, 50, 0.05, rng);
    const auto sn = discover_snippets(t, 2, 50);
    if (sn.size() != 2) continue;
    const bool h0 = sn[0].subsequence.offset() + 50 <= 500;
    const bool h1 = sn[1].subsequence.offset() + 50 <= 500;
    bool cov = true;
    for (const auto& x : sn) cov = cov && std::abs(x.coverage - 0.5) <= kCoverageTol;
    ok += (h0 != h1 && cov) ? 1 : 0;
  }
  const double secs = seconds_since(t0);
  report(ok == kSnippetTrials && secs < kSnippetSeconds, "snippet-regimes",
         fmt("%d/%d trials time=%.3fs", ok, kSnippetTrials, secs));
}

double purity(const std::vector<std::size_t>& a, const std::vector<std::size_t>& truth) {
  std::map<std::size_t, std::map<std::size_t, std::size_t>> table;
  for (std::size_t i = 0; i < truth.size(); ++i) ++table[a[i]][truth[i]];
  std::size_t hit = 0;
  for (const auto& [c, row] : table) {
    std::size_t top = 0;
    for (const auto& [t, n] : row) top = std::max(top, n);
    hit += top;
  }
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

// k-shape as the pipeline runs it (RunConfig default restarts); the
// single-initialisation rate is printed alongside for reference.
void clustering_purity() {
  KShapeOptions pipeline;
  pipeline.restarts = RunConfig{}.kshape_restarts;
  int ok = 0, single = 0;
  for (int s = 0; s < kPurityTrials; ++s) {
    std::mt19937_64 rng(s);
    std::vector<std::vector<double>> seqs;
    std::vector<std::size_t> truth;
    synth::shifted_templates(20, 64, 8, 0.1, rng, seqs, truth);
    const auto seed = static_cast<std::uint64_t>(s);
    ok += purity(kshape(seqs, 2, seed, pipeline).assignment, truth) == 1.0 ? 1 : 0;
    single += purity(kshape(seqs, 2, seed).assignment, truth) == 1.0 ? 1 : 0;
  }
  report(ok >= kPurityPassRate * kPurityTrials, "clustering-purity",
         fmt("purity 1.0 in %d/%d with %zu restarts (single init %d/%d)", ok, kPurityTrials, pipeline.restarts, single,
             kPurityTrials));
}

CausalDag select_from_matrix(const FactorMatrix& m, const ConstraintSet& cs, const ResolveOptions& ro = {}) {
  const auto pag = apply_constraints(discover_pag(m).pag, cs);
  const auto cands = resolve_candidates(pag, cs, ro);
  return cands.candidates[select_graph(cands, m).best].dag;
}

void causal_recovery() {
  int skeleton_ok = 0, label_ok = 0, prec_ok = 0;
  PrecedenceRelation prec{2, {0.0, 0.0, 1.0, 0.0}};  // after(B, A) = 1
  for (int s = 0; s < kCausalRuns; ++s) {
    std::mt19937_64 rng(s);
    const auto m = synth::chain_matrix(kCausalRows, kCausalFlip, rng);
    const auto plain = select_from_matrix(m, ConstraintSet{2, nullptr, 0.9});
    const auto constrained = select_from_matrix(m, ConstraintSet{2, &prec, 0.9});
    auto skel = [](const CausalDag& g) {
      std::set<std::pair<std::size_t, std::size_t>> out;
      for (const auto& e : g.edges) out.insert({std::min(e.from, e.to), std::max(e.from, e.to)});
      return out;
    };
    const std::set<std::pair<std::size_t, std::size_t>> want{{0, 1}, {1, 2}};
    skeleton_ok += skel(plain) == want ? 1 : 0;
    bool out_zero = true;
    for (const auto* g : {&plain, &constrained}) {
      for (const auto& e : g->edges) out_zero = out_zero && e.from != 2;
    }
    label_ok += out_zero ? 1 : 0;
    prec_ok += constrained.has_edge(1, 0) ? 0 : 1;
  }
  report(skeleton_ok >= kSkeletonPassRate * kCausalRuns && label_ok == kCausalRuns && prec_ok == kCausalRuns,
         "causal-recovery",
         fmt("skeleton %d/%d, label out-degree 0 %d/%d, B->A absent %d/%d", skeleton_ok, kCausalRuns, label_ok,
             kCausalRuns, prec_ok, kCausalRuns));
}

void ate_correctness() {
  const auto t0 = Clock::now();
  int ok = 0;
  for (int s = 0; s < kAteRuns; ++s) {
    std::mt19937_64 rng(s);
    const auto m = synth::confounded_matrix(5000, 0.3, 0.4, rng);
    const double phi = edge_effect(m, 1, 2);
    double sum[2] = {0, 0}, n[2] = {0, 0};
    for (std::size_t r = 0; r < m.rows(); ++r) {
      sum[m.value(1, r)] += m.value(2, r);
      n[m.value(1, r)] += 1;
    }
    const double naive = sum[1] / n[1] - sum[0] / n[0];
    ok += (std::abs(phi - 0.3) <= kAteTol && std::abs(naive - 0.3) > kNaiveMinError) ? 1 : 0;
  }
  const double secs = seconds_since(t0);
  report(ok >= kAtePassRate * kAteRuns && secs < kAteSeconds, "ate-correctness",
         fmt("%d/%d runs time=%.3fs", ok, kAteRuns, secs));
}

// Random 4-node DAG over three factors plus the label, data drawn from it,
// and a PAG that keeps the true skeleton with 1-3 edges left uncertain.
void bootstrap_agreement() {
  int agree = 0, cases = 0;
  std::mt19937_64 rng(2024);
  while (cases < kBootstrapCases) {
    std::bernoulli_distribution half(0.5), third(1.0 / 3.0);
    CausalDag truth{4, 3, {}};
    for (std::size_t a = 0; a < 4; ++a) {
      for (std::size_t b = a + 1; b < 4; ++b) {
        if (half(rng)) truth.add_edge(a, b);  // topological order 0..3 keeps it acyclic
      }
    }
    if (truth.edges.empty()) continue;
    FactorMatrix m;
    const std::size_t rows = 1500;
    m.factor_bits.assign(3, std::vector<std::uint8_t>(rows));
    m.label_column = std::vector<int>(rows);
    m.class_count = 2;
    for (std::size_t f = 0; f < 3; ++f) m.factor_ids.push_back(f);
    std::bernoulli_distribution noise(0.15);
    for (std::size_t r = 0; r < rows; ++r) {
      m.row_ids.push_back(std::to_string(r));
      int v[4];
      for (std::size_t x = 0; x < 4; ++x) {
        const auto ps = truth.parents(x);
        int val = ps.empty() ? half(rng) : 0;
        for (std::size_t p : ps) val ^= v[p];
        v[x] = val ^ static_cast<int>(noise(rng));
        if (x < 3) m.factor_bits[x][r] = static_cast<std::uint8_t>(v[x]);
        else (*m.label_column)[r] = v[x];
      }
    }
    Pag pag(4, 3);
    std::uniform_int_distribution<std::size_t> k_unc(1, std::min<std::size_t>(3, truth.edges.size()));
    const std::size_t uncertain = k_unc(rng);
    auto edges = truth.edges;
    std::shuffle(edges.begin(), edges.end(), rng);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto& e = edges[i];
      if (i >= uncertain) pag.add_edge(e.from, e.to, Mark::Tail, Mark::Arrow);
      else if (third(rng)) pag.add_edge(e.from, e.to, Mark::Circle, Mark::Arrow);
      else pag.add_edge(e.from, e.to, Mark::Circle, Mark::Circle);
    }
    const ConstraintSet cs{3, nullptr, 0.9};
    const auto exact = resolve_candidates(pag, cs);
    ResolveOptions ro;
    ro.budget = kBootstrapB;
    ro.enumeration_cutoff = 0;
    ro.seed = static_cast<std::uint64_t>(cases);
    const auto sampled = resolve_candidates(pag, cs, ro);
    if (!sampled.sampled || exact.sampled) continue;
    const auto& a = exact.candidates[select_graph(exact, m).best].dag;
    const auto& b = sampled.candidates[select_graph(sampled, m).best].dag;
    agree += a == b ? 1 : 0;
    ++cases;
  }
  report(agree == kBootstrapCases, "bootstrap-exhaustive-agreement", fmt("%d/%d cases", agree, kBootstrapCases));
}

double sine01(double ph) { return std::sin(synth::kTwoPi * ph); }

void prune_oracle() {
  std::mt19937_64 rng(77);
  double (*shapes[4])(double) = {sine01, synth::square_wave, synth::sawtooth,
                                 [](double ph) { return ph < 0.25 ? 1.0 : 0.0; }};
  const std::size_t l = 16, cycles = 5;
  int ok = 0;
  for (int c = 0; c < kPruneCases; ++c) {
    std::uniform_int_distribution<std::size_t> nf(1, 4), rows(1, 8), shape(0, 3);
    std::bernoulli_distribution coin(0.5);
    CausalStructure s;
    const std::size_t n = nf(rng);
    for (std::size_t f = 0; f < n; ++f) {
      std::vector<double> cyc(l);
      for (std::size_t j = 0; j < l; ++j) cyc[j] = shapes[(f + c) % 4](static_cast<double>(j) / l);
      s.factors.push_back(ShapeCluster{f, znormalize(cyc), {}});
    }
    s.label = n;
    s.graph = CausalDag{n + 1, n, {}};
    for (std::size_t f = 0; f < n; ++f) {
      if (coin(rng)) s.graph.add_edge(f, n);
    }
    s.config.k_snippets = 2;
    s.snippet_length = l;

    std::vector<TimeSeries> series;
    std::normal_distribution<double> g(0.0, 0.1);
    for (std::size_t r = rows(rng); r > 0; --r) {
      TimeSeries t;
      t.id = std::to_string(series.size());
      t.label = static_cast<int>(series.size() % 2);
      const std::size_t a = shape(rng), b = shape(rng);
      for (std::size_t k = 0; k < cycles; ++k) {
        for (std::size_t j = 0; j < l; ++j) t.values.push_back(shapes[k < 2 ? a : b](static_cast<double>(j) / l) + g(rng));
      }
      series.push_back(std::move(t));
    }
    const auto d = make_dataset(series);
    const auto pruned = prune_dataset(d, s);

    // Row-by-row evaluation: keep T_i iff one of its snippets lands in a factor with an edge into the label.
    std::vector<std::string> want;
    for (const auto& t : d.series) {
      bool keep = false;
      for (const auto& sn : discover_snippets(t, 2, l)) {
        std::size_t best = 0;
        double bd = INFINITY;
        for (std::size_t f = 0; f < n; ++f) {
          const double dist = sbd(sn.subsequence.values, s.factors[f].centroid).distance;
          if (dist < bd) bd = dist, best = f;
        }
        keep = keep || s.graph.has_edge(best, n);
      }
      if (keep) want.push_back(t.id);
    }
    bool same = pruned.size() == want.size();
    for (std::size_t i = 0; same && i < want.size(); ++i) {
      same = pruned.series[i].id == want[i] &&
             pruned.series[i].values == d.series[std::stoul(want[i])].values;
    }
    ok += same ? 1 : 0;
  }
  report(ok == kPruneCases, "prune-oracle-equivalence", fmt("%d/%d cases identical", ok, kPruneCases));
}

void cir_properties() {
  std::mt19937_64 rng(99);
  int bounded = 0, zero = 0, monotone = 0;
  for (int c = 0; c < kCirCases; ++c) {
    std::uniform_int_distribution<std::size_t> nf(1, 10);
    const std::size_t n = nf(rng);
    std::uniform_int_distribution<std::size_t> node(0, n);
    CausalStructure s;
    s.factors.resize(n);
    s.label = n;
    s.graph = CausalDag{n + 1, n, {}};
    for (int e = 0; e < 12; ++e) {
      const auto a = node(rng), b = node(rng);
      if (a != b && a != n && !s.graph.has_edge(b, a)) s.graph.add_edge(a, b);
    }
    const double v = cir(s);
    bounded += (v >= 0.0 && v <= 1.0) ? 1 : 0;
    auto no_label = s;
    no_label.graph.edges.erase(std::remove_if(no_label.graph.edges.begin(), no_label.graph.edges.end(),
                                              [&](const DirectedEdge& e) { return e.to == n; }),
                               no_label.graph.edges.end());
    zero += cir(no_label) == 0.0 ? 1 : 0;
    auto more = s;
    more.graph.add_edge(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng), n);
    monotone += cir(more) >= v ? 1 : 0;
  }
  std::mt19937_64 prng(5);
  const auto pc = synth::powercons_like(180, prng);
  RunConfig cfg;
  cfg.seed = 5;
  const auto structure = build_structure(pc, cfg);
  const double fraction = static_cast<double>(prune_dataset(pc, structure).size()) / static_cast<double>(pc.size());
  report(bounded == kCirCases && zero == kCirCases && monotone == kCirCases && fraction >= kPrunedFractionMin &&
             fraction <= 1.0,
         "cir-properties",
         fmt("bounded %d/%d, zero %d/%d, monotone %d/%d, PowerCons-like kept %.3f", bounded, kCirCases, zero,
             kCirCases, monotone, kCirCases, fraction));
}

void determinism() {
  std::mt19937_64 rng(8);
  const auto d = synth::planted_dataset(120, 50, 8, 0.1, rng);
  RunConfig cfg;
  cfg.seed = 8;
  cfg.l_override = 50;
  const auto first = io::export_structure(build_structure(d, cfg));
  int same = 0;
  for (int r = 0; r < kDeterminismRepeats; ++r) same += io::export_structure(build_structure(d, cfg)) == first ? 1 : 0;
  report(same == kDeterminismRepeats, "determinism", fmt("%d/%d byte-identical", same, kDeterminismRepeats));
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void()>> criteria[] = {
      {"period-recovery", period_recovery},
      {"snippet-regimes", snippet_regimes},
      {"clustering-purity", clustering_purity},
      {"causal-recovery", causal_recovery},
      {"ate-correctness", ate_correctness},
      {"bootstrap-exhaustive-agreement", bootstrap_agreement},
      {"prune-oracle-equivalence", prune_oracle},
      {"cir-properties", cir_properties},
      {"determinism", determinism},
  };
  for (const auto& [name, fn] : criteria) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(false, name, std::string("threw: ") + e.what());
    }
  }
  std::printf("%d criteria failed\n", failures);
  return failures;
}
