#pragma once

#include <cstdint>
#include <vector>

#include "pdsort/grid.hpp"

namespace pdsort {

/// Per-point ranks: positive integers for exact non-dominated sorting (the
/// longest-chain depth; depth k means membership in Pareto front k), or
/// nonnegative reals for approximate ranking.
using DepthVector = std::vector<double>;

/// Longest-chain depth of every point: depth(x) = 1 + max depth over points
/// strictly dominated by x (componentwise <= and not equal). Duplicate points
/// receive equal depth. O(n^2), any dimension; this is the ground-truth oracle.
DepthVector longest_chain_depths(const PointCloud& cloud);

/// O(n log n) two-dimensional sorter: lexicographic sweep with a per-depth
/// envelope of minimal second coordinates, binary-searched per point.
/// Output is identical to longest_chain_depths.
DepthVector nondominated_sort_2d(const PointCloud& cloud);

enum class SortMethod { automatic, brute_force, fast_2d };

/// Dispatches to the fast 2D sweep when d == 2, the brute force otherwise.
DepthVector nondominated_sort(const PointCloud& cloud,
                              SortMethod method = SortMethod::automatic);

/// Groups point indices by depth: front k holds exactly the indices with
/// depth k + 1. Requires integral depths >= 1.
std::vector<std::vector<std::int64_t>> pareto_fronts(const DepthVector& depths);

} // namespace pdsort
