#include "mcns/encode.hpp"

#include <limits>
#include <sstream>

#include "mcns/error.hpp"

namespace mcns {

std::size_t assign_factor(const Snippet& snippet, const std::vector<ShapeCluster>& clusters) {
  if (clusters.empty()) throw Error(ErrorCode::InvalidArgument, "assign_factor: no clusters");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (clusters[c].centroid.size() != snippet.subsequence.values.size()) {
      throw Error(ErrorCode::LengthMismatch, "assign_factor: centroid length " +
                                                 std::to_string(clusters[c].centroid.size()) +
                                                 " != snippet length " +
                                                 std::to_string(snippet.subsequence.values.size()));
    }
    const double d = sbd(snippet.subsequence.values, clusters[c].centroid).distance;
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return clusters[best].factor_id;
}

FactorAssignments assign_factors(const SnippetTable& snippets,
                                 const std::vector<ShapeCluster>& clusters) {
  FactorAssignments out(snippets.size());
  const auto count = static_cast<long>(snippets.size());
  // Row-parallel; each row writes its own slot.
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (long r = 0; r < count; ++r) {
    try {
      for (const auto& s : snippets[r]) out[r].push_back(assign_factor(s, clusters));
    } catch (...) {
#pragma omp critical(mcns_assign_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

FactorMatrix encode_assignments(const Dataset& dataset, const FactorAssignments& assignments,
                                std::size_t factor_count) {
  if (assignments.size() != dataset.size()) {
    throw Error(ErrorCode::MissingSnippets, "encode: snippet table does not cover the dataset");
  }
  FactorMatrix fm;
  fm.factor_bits.assign(factor_count, std::vector<std::uint8_t>(dataset.size(), 0));
  for (std::size_t f = 0; f < factor_count; ++f) fm.factor_ids.push_back(f);
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    fm.row_ids.push_back(dataset.series[r].id);
    if (assignments[r].empty()) {
      throw Error(ErrorCode::MissingSnippets,
                  "encode: series '" + dataset.series[r].id + "' has no snippets");
    }
    for (std::size_t f : assignments[r]) {
      if (f >= factor_count) throw Error(ErrorCode::InvalidArgument, "encode: factor id out of range");
      fm.factor_bits[f][r] = 1;
    }
  }
  if (dataset.labeled()) {
    fm.class_count = dataset.class_count;
    std::vector<int> labels;
    labels.reserve(dataset.size());
    for (const auto& s : dataset.series) {
      if (!s.label) throw Error(ErrorCode::InvalidArgument, "encode: series '" + s.id + "' lacks a label");
      labels.push_back(*s.label);
    }
    fm.label_column = std::move(labels);
  }
  return fm;
}

FactorMatrix encode_dataset(const Dataset& dataset, const SnippetTable& snippets,
                            const std::vector<ShapeCluster>& clusters) {
  if (snippets.size() != dataset.size()) {
    throw Error(ErrorCode::MissingSnippets, "encode: snippet table does not cover the dataset");
  }
  for (std::size_t r = 0; r < snippets.size(); ++r) {
    if (snippets[r].empty()) {
      throw Error(ErrorCode::MissingSnippets,
                  "encode: series '" + dataset.series[r].id + "' has no snippets");
    }
  }
  return encode_assignments(dataset, assign_factors(snippets, clusters), clusters.size());
}

PrecedenceRelation temporal_precedence(const Dataset& dataset, const SnippetTable& snippets,
                                       const FactorAssignments& assignments,
                                       std::size_t factor_count) {
  if (snippets.size() != dataset.size() || assignments.size() != dataset.size()) {
    throw Error(ErrorCode::MissingSnippets, "precedence: snippet table does not cover the dataset");
  }
  constexpr auto kAbsent = std::numeric_limits<std::size_t>::max();
  const std::size_t n = factor_count;
  std::vector<std::size_t> later(n * n, 0);
  std::vector<std::size_t> together(n * n, 0);
  std::vector<std::size_t> first(n);
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    std::fill(first.begin(), first.end(), kAbsent);
    for (std::size_t i = 0; i < snippets[r].size(); ++i) {
      const std::size_t f = assignments[r][i];
      first[f] = std::min(first[f], snippets[r][i].subsequence.start);
    }
    for (std::size_t x = 0; x < n; ++x) {
      if (first[x] == kAbsent) continue;
      for (std::size_t y = 0; y < n; ++y) {
        if (x == y || first[y] == kAbsent) continue;
        ++together[x * n + y];
        if (first[x] > first[y]) ++later[x * n + y];
      }
    }
  }
  PrecedenceRelation rel;
  rel.factor_count = n;
  rel.after_fraction.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n * n; ++i) {
    if (together[i] > 0) {
      rel.after_fraction[i] = static_cast<double>(later[i]) / static_cast<double>(together[i]);
    }
  }
  return rel;
}

std::string factor_matrix_csv(const FactorMatrix& matrix) {
  std::ostringstream os;
  os << "# mcns factor matrix v1\n";
  for (std::size_t f = 0; f < matrix.factor_count(); ++f) {
    os << (f ? "," : "") << 'F' << matrix.factor_ids[f];
  }
  if (matrix.has_label()) os << (matrix.factor_count() ? "," : "") << "label";
  os << '\n';
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t f = 0; f < matrix.factor_count(); ++f) {
      os << (f ? "," : "") << static_cast<int>(matrix.factor_bits[f][r]);
    }
    if (matrix.has_label()) os << (matrix.factor_count() ? "," : "") << (*matrix.label_column)[r];
    os << '\n';
  }
  return os.str();
}

}  // namespace mcns
