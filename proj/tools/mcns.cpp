// mcns command-line front end.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "mcns/error.hpp"
#include "mcns/io.hpp"
#include "mcns/structure.hpp"

using namespace mcns;

namespace {

void fail_json(const std::string& code, const std::string& message, const std::string& stage = {}) {
  nlohmann::ordered_json j;
  j["error"] = code;
  j["message"] = message;
  if (!stage.empty()) j["stage"] = stage;
  std::cerr << j.dump() << "\n";
}

std::string stem_of(const std::string& path) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  return dot != std::string::npos && (slash == std::string::npos || dot > slash) ? path.substr(0, dot) : path;
}

std::string scalar(double v) {
  std::string s = io::format_double(v);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

// Relabels `test` ids so that shared label tokens agree with `train`.
std::vector<int> aligned_labels(const Dataset& train, const Dataset& test) {
  std::map<std::string, int> ids;
  for (std::size_t i = 0; i < train.label_names.size(); ++i) ids[train.label_names[i]] = static_cast<int>(i);
  int next = static_cast<int>(train.label_names.size());
  std::vector<int> out;
  for (const auto& s : test.series) {
    const std::string& name = test.label_names.at(static_cast<std::size_t>(*s.label));
    auto [it, inserted] = ids.try_emplace(name, next);
    if (inserted) ++next;
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mine causal natural structures in univariate time series"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  auto add_seed = [&](CLI::App* cmd) { cmd->add_option("--seed", seed, "Random seed"); };

  // discover
  auto* discover = app.add_subcommand("discover", "Build a causal structure from a dataset");
  std::string data_path, config_path, out_path, dot_path;
  std::optional<std::size_t> l_opt, k_opt, clusters_opt;
  discover->add_option("data", data_path, "UCR-style dataset")->required();
  discover->add_option("--config", config_path, "RunConfig JSON");
  discover->add_option("--out", out_path, "Structure JSON (default <data>.structure.json)");
  discover->add_option("--dot", dot_path, "DOT graph (default <data>.structure.dot)");
  discover->add_option("--l", l_opt, "Snippet length override");
  discover->add_option("--k", k_opt, "Snippets per series");
  discover->add_option("--clusters", clusters_opt, "Number of shape factors");
  add_seed(discover);

  // strength
  auto* strength = app.add_subcommand("strength", "Export per-step causal strengths");
  std::string structure_path;
  strength->add_option("structure", structure_path, "Structure JSON")->required();
  strength->add_option("data", data_path, "UCR-style dataset")->required();
  strength->add_option("--out", out_path, "Strengths JSON (default <data>.strengths.json)");
  add_seed(strength);

  // prune
  auto* prune = app.add_subcommand("prune", "Drop series without a causal factor");
  prune->add_option("structure", structure_path, "Structure JSON")->required();
  prune->add_option("data", data_path, "UCR-style dataset")->required();
  prune->add_option("--out", out_path, "Pruned dataset (default <data>.pruned<ext>)");
  add_seed(prune);

  // classify
  auto* classify = app.add_subcommand("classify", "kNN over causally selected snippets");
  std::string train_path, test_path;
  std::size_t knn = 1;
  classify->add_option("structure", structure_path, "Structure JSON")->required();
  classify->add_option("train", train_path, "Training dataset")->required();
  classify->add_option("test", test_path, "Test dataset")->required();
  classify->add_option("--knn", knn, "Neighbours (odd)");
  classify->add_option("--out", out_path, "Metrics CSV (default <test>.metrics.csv)");
  add_seed(classify);

  // cir
  auto* cir_cmd = app.add_subcommand("cir", "Causal information ratio of a structure");
  cir_cmd->add_option("structure", structure_path, "Structure JSON")->required();
  add_seed(cir_cmd);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "CIR over a grid of snippet lengths and counts");
  std::string l_grid = "0.5L:0.5L:5L", k_grid = "5";
  sweep->add_option("data", data_path, "UCR-style dataset")->required();
  sweep->add_option("--l-grid", l_grid, "Snippet lengths, e.g. 0.5L:0.5L:5L");
  sweep->add_option("--k-grid", k_grid, "Snippet counts, e.g. 1:1:10");
  sweep->add_option("--config", config_path, "RunConfig JSON");
  sweep->add_option("--out", out_path, "CSV (default <data>.sweep.csv)");
  add_seed(sweep);

  // dot
  auto* dot = app.add_subcommand("dot", "Render a structure as DOT");
  std::optional<std::size_t> series_index;
  dot->add_option("structure", structure_path, "Structure JSON")->required();
  dot->add_option("--data", data_path, "Dataset holding the series for series mode");
  dot->add_option("--series", series_index, "Row index of the series (series mode)");
  dot->add_option("--out", out_path, "DOT file (default standard output)");
  add_seed(dot);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fail_json("UsageError", e.what());
    return 2;
  }

  try {
    if (*discover) {
      RunConfig cfg = config_path.empty() ? RunConfig{} : io::parse_config(io::read_file(config_path));
      if (seed) cfg.seed = *seed;
      if (l_opt) cfg.l_override = *l_opt;
      if (k_opt) cfg.k_snippets = *k_opt;
      if (clusters_opt) cfg.n_clusters = *clusters_opt;
      const Dataset ds = io::load_ucr(data_path);
      const CausalStructure s = build_structure(ds, cfg);
      if (out_path.empty()) out_path = stem_of(data_path) + ".structure.json";
      if (dot_path.empty()) dot_path = stem_of(out_path) + ".dot";
      io::write_file_atomic(out_path, io::export_structure(s));
      io::write_file_atomic(dot_path, io::export_dot(s));
      for (const auto& w : s.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << out_path << "\n" << dot_path << "\n";
    } else if (*strength) {
      const CausalStructure s = io::import_structure(io::read_file(structure_path));
      const Dataset ds = io::load_ucr(data_path);
      std::vector<std::pair<std::string, std::vector<double>>> zeta(ds.size());
      std::vector<std::exception_ptr> errors(ds.size());
#pragma omp parallel for schedule(dynamic)
      for (std::size_t r = 0; r < ds.size(); ++r) {
        try {
          const auto enc = encode_series(ds.series[r], s);
          const std::size_t label_node = s.label ? *s.label : s.factor_count();
          zeta[r] = {ds.series[r].id,
                     timestep_strengths(ds.series[r].size(), enc.snippets, enc.factors, s.strengths, label_node)};
        } catch (...) {
          errors[r] = std::current_exception();
        }
      }
      for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
      if (out_path.empty()) out_path = stem_of(data_path) + ".strengths.json";
      io::write_file_atomic(out_path, io::export_strengths(s, zeta));
      std::cout << out_path << "\n";
    } else if (*prune) {
      const CausalStructure s = io::import_structure(io::read_file(structure_path));
      const std::string text = io::read_file(data_path);
      const char delim = io::detect_delimiter(text.substr(0, text.find('\n')));
      const Dataset ds = io::parse_ucr(text, delim);
      const Dataset kept = prune_dataset(ds, s);
      if (out_path.empty()) {
        const std::string stem = stem_of(data_path);
        out_path = stem + ".pruned" + data_path.substr(stem.size());
      }
      io::write_ucr(out_path, kept, delim);
      std::cout << kept.size() << "/" << ds.size() << " series retained\n" << out_path << "\n";
    } else if (*classify) {
      const CausalStructure s = io::import_structure(io::read_file(structure_path));
      const Dataset train = io::load_ucr(train_path);
      const Dataset test = io::load_ucr(test_path);
      const std::size_t k = s.config.k_snippets;
      const std::size_t l = s.snippet_length;
      std::vector<std::pair<Representation, int>> reps(train.size());
      std::vector<int> predicted(test.size());
      std::vector<std::exception_ptr> errors(train.size() + test.size());
#pragma omp parallel for schedule(dynamic)
      for (std::size_t r = 0; r < train.size(); ++r) {
        try {
          reps[r] = {represent(train.series[r], s, k, l), *train.series[r].label};
        } catch (...) {
          errors[r] = std::current_exception();
        }
      }
      for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
#pragma omp parallel for schedule(dynamic)
      for (std::size_t r = 0; r < test.size(); ++r) {
        try {
          predicted[r] = classify_knn(reps, represent(test.series[r], s, k, l), knn);
        } catch (...) {
          errors[train.size() + r] = std::current_exception();
        }
      }
      for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
      const auto truth = aligned_labels(train, test);
      const double acc = accuracy(predicted, truth);
      const double f1 = macro_f1(predicted, truth);
      if (out_path.empty()) out_path = stem_of(test_path) + ".metrics.csv";
      io::write_file_atomic(out_path, "# mcns metrics v1\naccuracy,macro_f1\n" + io::format_double(acc) +
                                          "," + io::format_double(f1) + "\n");
      std::cout << "accuracy " << scalar(acc) << "\nmacro_f1 " << scalar(f1) << "\n";
    } else if (*cir_cmd) {
      const CausalStructure s = io::import_structure(io::read_file(structure_path));
      std::cout << scalar(cir(s)) << "\n";
    } else if (*sweep) {
      RunConfig cfg = config_path.empty() ? RunConfig{} : io::parse_config(io::read_file(config_path));
      if (seed) cfg.seed = *seed;
      const Dataset ds = io::load_ucr(data_path);
      const bool needs_unit = l_grid.find_first_of("Ll") != std::string::npos;
      const std::optional<std::size_t> unit =
          needs_unit ? std::optional<std::size_t>(unified_length(ds)) : std::nullopt;
      const auto cells = sweep_parameters(ds, io::parse_grid(l_grid, unit), io::parse_grid(k_grid), cfg);
      if (out_path.empty()) out_path = stem_of(data_path) + ".sweep.csv";
      const std::string csv = io::sweep_csv(cells);
      io::write_file_atomic(out_path, csv);
      std::cout << csv;
    } else if (*dot) {
      const CausalStructure s = io::import_structure(io::read_file(structure_path));
      std::string text;
      if (series_index) {
        if (data_path.empty()) throw Error(ErrorCode::InvalidArgument, "--series needs --data");
        const Dataset ds = io::load_ucr(data_path);
        if (*series_index >= ds.size()) throw Error(ErrorCode::InvalidArgument, "--series out of range");
        text = io::export_dot(s, encode_series(ds.series[*series_index], s).present);
      } else {
        text = io::export_dot(s);
      }
      if (out_path.empty()) std::cout << text;
      else io::write_file_atomic(out_path, text);
    }
  } catch (const Error& e) {
    fail_json(std::string(to_string(e.code())), e.what(), e.stage());
    return 1;
  } catch (const std::exception& e) {
    fail_json("InternalError", e.what());
    return 1;
  }
  return 0;
}
