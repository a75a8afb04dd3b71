#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mcns/kernels.hpp"
#include "mcns/snippets.hpp"

namespace mcns {

struct ClusterMember {
  std::string series_id;
  std::size_t snippet_rank = 1;
  bool operator==(const ClusterMember&) const = default;
};

struct ShapeCluster {
  std::size_t factor_id = 0;
  std::vector<double> centroid;
  std::vector<ClusterMember> members;
  bool operator==(const ShapeCluster&) const = default;
};

using SbdResult = kernels::SbdResult;

// 1 - max_s NCC_c(x, y, s) after z-normalising both inputs.
SbdResult sbd(std::span<const double> x, std::span<const double> y);

// Zero-padded shift: out[i] = x[i - shift] where defined, 0 elsewhere.
std::vector<double> shift_sequence(std::span<const double> x, long shift);

// Centroid refinement: align members to the current centroid, then take the
// dominant eigenvector of the centred alignment matrix.
std::vector<double> shape_extract(const std::vector<std::vector<double>>& members,
                                  std::span<const double> current_centroid);

struct KShapeOptions {
  std::size_t max_iter = 100;
  // Independent random initialisations; the run with the lowest final
  // objective wins. Restart r uses seed + r.
  std::size_t restarts = 1;
  bool parallel = true;
};

struct KShapeResult {
  std::vector<ShapeCluster> clusters;
  std::vector<std::size_t> assignment;  // per input sequence
  std::vector<double> objective;        // sum of SBD to assigned centroid, per iteration
  std::size_t iterations = 0;
  bool converged = false;
};

// Clusters raw sequences (all of equal length) into n shape classes.
KShapeResult kshape(const std::vector<std::vector<double>>& sequences, std::size_t n,
                    std::uint64_t seed, const KShapeOptions& options = {});

// Pools snippets and clusters them; members carry (series id, rank).
std::vector<ShapeCluster> kshape_cluster(const std::vector<Snippet>& snippets, std::size_t n,
                                         std::uint64_t seed, const KShapeOptions& options = {});

}  // namespace mcns
