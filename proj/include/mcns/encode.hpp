#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcns/kshape.hpp"
#include "mcns/series.hpp"
#include "mcns/snippets.hpp"

namespace mcns {

// Snippets per series, in dataset order.
using SnippetTable = std::vector<std::vector<Snippet>>;
// Factor id of every snippet, same shape as SnippetTable.
using FactorAssignments = std::vector<std::vector<std::size_t>>;

// Binary "contains factor" table, one row per series. Graph nodes are the
// factor columns 0..n-1 followed by the label column (node n) when present.
struct FactorMatrix {
  std::vector<std::string> row_ids;
  std::vector<std::size_t> factor_ids;
  std::vector<std::vector<std::uint8_t>> factor_bits;  // [factor][row]
  std::optional<std::vector<int>> label_column;
  std::size_t class_count = 0;

  std::size_t rows() const noexcept { return row_ids.size(); }
  std::size_t factor_count() const noexcept { return factor_bits.size(); }
  bool has_label() const noexcept { return label_column.has_value(); }
  std::size_t label_node() const noexcept { return factor_count(); }
  std::size_t node_count() const noexcept { return factor_count() + (has_label() ? 1 : 0); }

  int value(std::size_t node, std::size_t row) const {
    return node < factor_count() ? factor_bits[node][row] : (*label_column)[row];
  }
  int arity(std::size_t node) const {
    return node < factor_count() ? 2 : static_cast<int>(class_count);
  }
  std::uint8_t bit(std::size_t row, std::size_t factor) const { return factor_bits[factor][row]; }

  bool operator==(const FactorMatrix&) const = default;
};

struct PrecedenceRelation {
  std::size_t factor_count = 0;
  std::vector<double> after_fraction;  // row-major [x * n + y]

  // Fraction of co-occurring series in which x first appears strictly after y.
  double after(std::size_t x, std::size_t y) const { return after_fraction[x * factor_count + y]; }
};

// Nearest centroid by SBD; ties go to the lower factor id.
std::size_t assign_factor(const Snippet& snippet, const std::vector<ShapeCluster>& clusters);

FactorAssignments assign_factors(const SnippetTable& snippets,
                                 const std::vector<ShapeCluster>& clusters);

FactorMatrix encode_dataset(const Dataset& dataset, const SnippetTable& snippets,
                            const std::vector<ShapeCluster>& clusters);

// Same encoding from precomputed assignments.
FactorMatrix encode_assignments(const Dataset& dataset, const FactorAssignments& assignments,
                                std::size_t factor_count);

PrecedenceRelation temporal_precedence(const Dataset& dataset, const SnippetTable& snippets,
                                       const FactorAssignments& assignments,
                                       std::size_t factor_count);

// Audit CSV: header of factor ids then `label`, one row per series.
std::string factor_matrix_csv(const FactorMatrix& matrix);

}  // namespace mcns
