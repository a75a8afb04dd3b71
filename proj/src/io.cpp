#include "mcns/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "json.hpp"

#include "mcns/error.hpp"

namespace mcns::io {

using Json = nlohmann::ordered_json;

namespace {

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> out;
  if (delimiter == ' ') {
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
  }
  std::size_t begin = 0;
  while (true) {
    const std::size_t end = line.find(delimiter, begin);
    std::string tok = line.substr(begin, end == std::string::npos ? std::string::npos : end - begin);
    const auto first = tok.find_first_not_of(" \t\r");
    const auto last = tok.find_last_not_of(" \t\r");
    out.push_back(first == std::string::npos ? std::string() : tok.substr(first, last - first + 1));
    if (end == std::string::npos) break;
    begin = end + 1;
  }
  return out;
}

std::optional<double> to_double(const std::string& tok) {
  double v = 0.0;
  const char* begin = tok.data();
  const char* end = tok.data() + tok.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::string node_label(std::size_t node, const std::optional<std::size_t>& label) {
  return node_name(node, label);
}

std::size_t parse_node(const std::string& name, std::size_t factor_count) {
  if (name == "label") return factor_count;
  if (name.size() > 1 && name[0] == 'F') {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), v);
    if (ec == std::errc() && ptr == name.data() + name.size() && v < factor_count) return v;
  }
  throw Error(ErrorCode::ParseError, "structure: unknown node '" + name + "'");
}

Json config_to_json(const RunConfig& c) {
  Json j;
  j["seed"] = c.seed;
  j["alpha"] = c.alpha;
  j["nClusters"] = c.n_clusters;
  j["kSnippets"] = c.k_snippets;
  j["thetaPrec"] = c.theta_prec;
  j["bootstrapB"] = c.bootstrap_b;
  j["lOverride"] = c.l_override ? Json(*c.l_override) : Json(nullptr);
  j["maxCondSize"] = c.max_cond_size;
  j["warmStart"] = c.warm_start;
  j["kshapeRestarts"] = c.kshape_restarts;
  return j;
}

RunConfig config_from_json(const Json& j) {
  RunConfig c;
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "seed") c.seed = value.get<std::uint64_t>();
    else if (key == "alpha") c.alpha = value.get<double>();
    else if (key == "nClusters") c.n_clusters = value.get<std::size_t>();
    else if (key == "kSnippets") c.k_snippets = value.get<std::size_t>();
    else if (key == "thetaPrec") c.theta_prec = value.get<double>();
    else if (key == "bootstrapB") c.bootstrap_b = value.get<std::size_t>();
    else if (key == "lOverride") c.l_override = value.is_null() ? std::nullopt : std::optional(value.get<std::size_t>());
    else if (key == "maxCondSize") c.max_cond_size = value.get<std::size_t>();
    else if (key == "warmStart") c.warm_start = value.get<bool>();
    else if (key == "kshapeRestarts") c.kshape_restarts = value.get<std::size_t>();
    else throw Error(ErrorCode::InvalidConfig, "config: unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

template <typename Fn>
auto parse_guard(Fn&& fn) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("json: ") + e.what());
  }
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + tmp + "'");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed for '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorCode::IoError, "cannot rename onto '" + path + "': " + ec.message());
  }
}

char detect_delimiter(const std::string& first_line) {
  if (first_line.find('\t') != std::string::npos) return '\t';
  if (first_line.find(',') != std::string::npos) return ',';
  return ' ';
}

Dataset parse_ucr(const std::string& text, std::optional<char> delimiter) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> width;
  std::vector<std::string> tokens_per_row;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (!delimiter) delimiter = detect_delimiter(line);
    const auto tokens = split(line, *delimiter);
    if (tokens.size() < 2) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected a label and samples");
    }
    if (width && tokens.size() != *width) {
      throw Error(ErrorCode::RaggedRows, "line " + std::to_string(line_no) + ": " +
                                             std::to_string(tokens.size() - 1) + " samples, expected " +
                                             std::to_string(*width - 1));
    }
    width = tokens.size();
    if (tokens[0].empty()) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": empty label");
    std::vector<double> values;
    values.reserve(tokens.size() - 1);
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      const auto v = to_double(tokens[i]);
      if (!v || !std::isfinite(*v)) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ", column " +
                                               std::to_string(i + 1) + ": bad sample '" + tokens[i] + "'");
      }
      values.push_back(*v);
    }
    tokens_per_row.push_back(tokens[0]);
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyFile, "no data rows");

  std::vector<std::string> names = tokens_per_row;
  std::sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) {
    const auto da = to_double(a);
    const auto db = to_double(b);
    if (da && db && *da != *db) return *da < *db;
    if (da.has_value() != db.has_value()) return da.has_value();
    return a < b;
  });
  names.erase(std::unique(names.begin(), names.end()), names.end());

  Dataset ds;
  ds.class_count = names.size();
  ds.label_names = names;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    TimeSeries ts;
    ts.id = std::to_string(r);
    ts.values = std::move(rows[r]);
    ts.label = static_cast<int>(std::find(names.begin(), names.end(), tokens_per_row[r]) - names.begin());
    ds.series.push_back(std::move(ts));
  }
  return ds;
}

Dataset load_ucr(const std::string& path, std::optional<char> delimiter) {
  try {
    return parse_ucr(read_file(path), delimiter);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_ucr(const Dataset& dataset, char delimiter) {
  std::string out;
  for (const auto& s : dataset.series) {
    if (s.label && static_cast<std::size_t>(*s.label) < dataset.label_names.size()) {
      out += dataset.label_names[*s.label];
    } else if (s.label) {
      out += std::to_string(*s.label);
    } else {
      out += "0";
    }
    for (double v : s.values) {
      out += delimiter;
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

void write_ucr(const std::string& path, const Dataset& dataset, char delimiter) {
  write_file_atomic(path, format_ucr(dataset, delimiter));
}

std::string export_structure(const CausalStructure& s) {
  Json j;
  j["version"] = kFormatVersion;
  j["seed"] = s.config.seed;
  j["snippetLength"] = s.snippet_length;
  j["kSnippets"] = s.config.k_snippets;
  j["config"] = config_to_json(s.config);

  Json factors = Json::array();
  for (const auto& f : s.factors) {
    Json members = Json::array();
    for (const auto& m : f.members) members.push_back({{"series", m.series_id}, {"rank", m.snippet_rank}});
    factors.push_back({{"id", f.factor_id},
                       {"centroid", f.centroid},
                       {"exemplarCount", f.members.size()},
                       {"members", std::move(members)}});
  }
  j["factors"] = std::move(factors);
  j["label"] = s.label ? Json("label") : Json(nullptr);

  Json edges = Json::array();
  for (const auto& e : s.graph.edges) {
    edges.push_back({{"from", node_label(e.from, s.label)},
                     {"to", node_label(e.to, s.label)},
                     {"strength", s.strengths.strength(e.from, e.to)}});
  }
  j["edges"] = std::move(edges);

  Json strengths = Json::array();
  for (const auto& [e, v] : s.strengths.per_edge) {
    strengths.push_back({{"from", node_label(e.from, s.label)}, {"to", node_label(e.to, s.label)}, {"value", v}});
  }
  j["strengths"] = std::move(strengths);

  Json candidates = Json::array();
  for (const auto& c : s.candidates) {
    Json ce = Json::array();
    for (const auto& e : c.edges) ce.push_back({node_label(e.from, s.label), node_label(e.to, s.label)});
    candidates.push_back({{"edges", std::move(ce)},
                          {"bicWeight", c.bic_weight},
                          {"bic", c.bic},
                          {"resolutionWeight", c.resolution_weight}});
  }
  j["candidates"] = std::move(candidates);
  j["warnings"] = s.warnings;
  return j.dump(2) + "\n";
}

CausalStructure import_structure(const std::string& json_text) {
  return parse_guard([&] {
    const Json j = Json::parse(json_text);
    if (j.at("version").get<int>() != kFormatVersion) {
      throw Error(ErrorCode::ParseError, "structure: unsupported version");
    }
    CausalStructure s;
    s.config = config_from_json(j.at("config"));
    s.snippet_length = j.at("snippetLength").get<std::size_t>();
    for (const auto& f : j.at("factors")) {
      ShapeCluster c;
      c.factor_id = f.at("id").get<std::size_t>();
      c.centroid = f.at("centroid").get<std::vector<double>>();
      if (f.contains("members")) {
        for (const auto& m : f.at("members")) {
          c.members.push_back(ClusterMember{m.at("series").get<std::string>(), m.at("rank").get<std::size_t>()});
        }
      }
      s.factors.push_back(std::move(c));
    }
    const std::size_t n = s.factors.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (s.factors[i].factor_id != i) throw Error(ErrorCode::ParseError, "structure: factor ids must be 0..n-1 in order");
    }
    if (!j.at("label").is_null()) s.label = n;
    s.graph = CausalDag{n + (s.label ? 1 : 0), s.label, {}};
    const auto parse_node = [&](const std::string& name, std::size_t count) {
      const std::size_t v = io::parse_node(name, count);
      if (v >= s.graph.node_count) throw Error(ErrorCode::ParseError, "structure: '" + name + "' without a label node");
      return v;
    };
    for (const auto& e : j.at("edges")) {
      s.graph.add_edge(parse_node(e.at("from").get<std::string>(), n),
                       parse_node(e.at("to").get<std::string>(), n));
    }
    if (j.contains("strengths")) {
      for (const auto& e : j.at("strengths")) {
        s.strengths.per_edge[DirectedEdge{parse_node(e.at("from").get<std::string>(), n),
                                          parse_node(e.at("to").get<std::string>(), n)}] =
            e.at("value").get<double>();
      }
    }
    for (const auto& c : j.at("candidates")) {
      ScoredCandidate sc;
      for (const auto& e : c.at("edges")) {
        sc.edges.push_back(DirectedEdge{parse_node(e.at(0).get<std::string>(), n),
                                        parse_node(e.at(1).get<std::string>(), n)});
      }
      sc.bic_weight = c.at("bicWeight").get<double>();
      sc.bic = c.value("bic", 0.0);
      sc.resolution_weight = c.value("resolutionWeight", 0.0);
      s.strengths.weights.push_back(sc.bic_weight);
      s.candidates.push_back(std::move(sc));
    }
    if (j.contains("warnings")) s.warnings = j.at("warnings").get<std::vector<std::string>>();
    return s;
  });
}

std::string export_strengths(const CausalStructure& s,
                             const std::vector<std::pair<std::string, std::vector<double>>>& zeta) {
  Json j;
  j["version"] = kFormatVersion;
  j["snippetLength"] = s.snippet_length;
  j["label"] = s.label ? Json("label") : Json(nullptr);
  Json edges = Json::array();
  for (const auto& [e, v] : s.strengths.per_edge) {
    edges.push_back({{"from", node_label(e.from, s.label)}, {"to", node_label(e.to, s.label)}, {"strength", v}});
  }
  j["edges"] = std::move(edges);
  j["weights"] = s.strengths.weights;
  Json series = Json::object();
  for (const auto& [id, z] : zeta) series[id] = z;
  j["series"] = std::move(series);
  return j.dump(2) + "\n";
}

namespace {

std::string dot_body(const CausalStructure& s, const std::vector<std::uint8_t>* present) {
  auto shown = [&](std::size_t node) {
    if (s.label && node == *s.label) return true;
    return !present || (node < present->size() && (*present)[node]);
  };
  std::string out = "digraph mcns {\n  rankdir=LR;\n";
  for (std::size_t f = 0; f < s.factors.size(); ++f) {
    if (shown(f)) out += "  \"" + node_name(f, s.label) + "\" [shape=circle];\n";
  }
  if (s.label) out += "  \"label\" [shape=doublecircle];\n";
  for (const auto& e : s.graph.edges) {
    if (!shown(e.from) || !shown(e.to)) continue;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", s.strengths.strength(e.from, e.to));
    out += "  \"" + node_name(e.from, s.label) + "\" -> \"" + node_name(e.to, s.label) + "\" [label=\"" +
           buf + "\"];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace

std::string export_dot(const CausalStructure& structure) { return dot_body(structure, nullptr); }

std::string export_dot(const CausalStructure& structure, const std::vector<std::uint8_t>& present) {
  return dot_body(structure, &present);
}

RunConfig parse_config(const std::string& json_text) {
  return parse_guard([&] { return config_from_json(Json::parse(json_text)); });
}

std::string config_json(const RunConfig& config) { return config_to_json(config).dump(2) + "\n"; }

std::vector<std::size_t> parse_grid(const std::string& text, std::optional<std::size_t> unit) {
  auto value = [&](std::string tok) {
    tok.erase(std::remove(tok.begin(), tok.end(), ' '), tok.end());
    double scale = 1.0;
    if (!tok.empty() && (tok.back() == 'L' || tok.back() == 'l')) {
      if (!unit) throw Error(ErrorCode::InvalidArgument, "grid: 'L' used without a base length");
      scale = static_cast<double>(*unit);
      tok.pop_back();
      if (tok.empty()) tok = "1";
    }
    const auto v = to_double(tok);
    if (!v || *v <= 0.0) throw Error(ErrorCode::InvalidArgument, "grid: bad value '" + tok + "'");
    return *v * scale;
  };

  std::vector<std::size_t> out;
  auto push = [&](double v) {
    const auto r = static_cast<std::size_t>(std::llround(v));
    if (r < 1) throw Error(ErrorCode::InvalidArgument, "grid: values must round to at least 1");
    if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
  };
  for (const auto& part : split(text, ',')) {
    if (part.empty()) continue;
    const auto terms = split(part, ':');
    if (terms.size() == 1) {
      push(value(terms[0]));
    } else if (terms.size() == 3) {
      const double lo = value(terms[0]);
      const double step = value(terms[1]);
      const double hi = value(terms[2]);
      for (std::size_t i = 0;; ++i) {
        const double v = lo + static_cast<double>(i) * step;
        if (v > hi + 1e-9 * std::max(1.0, hi)) break;
        push(v);
      }
    } else {
      throw Error(ErrorCode::InvalidArgument, "grid: expected start:step:stop in '" + part + "'");
    }
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "grid: empty");
  return out;
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
  std::string out = "# mcns sweep v1\nl,k,cir\n";
  for (const auto& c : cells) {
    out += std::to_string(c.l) + "," + std::to_string(c.k) + "," + (c.cir ? format_double(*c.cir) : "") + "\n";
  }
  return out;
}

}  // namespace mcns::io
