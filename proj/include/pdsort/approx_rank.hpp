#pragma once

#include <cstdint>

#include "pdsort/common.hpp"
#include "pdsort/density.hpp"
#include "pdsort/exact_sort.hpp"
#include "pdsort/grid.hpp"
#include "pdsort/hj_solver.hpp"

namespace pdsort {

/// Configuration of the fast approximate ranking pipeline.
struct RankerConfig {
    GridSpec grid;
    std::int64_t k = 0;
    std::uint64_t seed = 0;
    NodeSolveConfig node;

    /// `equalize` replaces the grid spacing with k^(-1/(2(d+1))), the value
    /// that balances the density-estimation and scheme-resolution error
    /// terms, clamped so every axis keeps at least 8 interior nodes.
    enum class HRule { explicit_spacing, equalize };
    HRule h_rule = HRule::explicit_spacing;
};

/// Effective grid after applying the h-rule.
GridSpec ranker_grid(const RankerConfig& cfg);

/// PDE-based ranking: subsample -> histogram density -> scheme solve ->
/// per-point sub-cell solve. Each point is ranked by solving the scheme
/// equation inside its grid cell, with backward values interpolated on the
/// cell faces; points in the zero boundary layers rank 0.
DepthVector rank_points_pde(const PointCloud& cloud, const RankerConfig& cfg,
                            Exec exec = Exec::parallel);

/// Subset-ranking baseline: exact-sort the subsample, average ranks per grid
/// cell, fill empty cells from the nearest nonempty cell (Chebyshev metric,
/// ties to the lowest row-major index), then rank every point by multilinear
/// interpolation of the node ranks.
DepthVector rank_points_subset(const PointCloud& cloud, const RankerConfig& cfg,
                               Exec exec = Exec::parallel);

/// Value of the solved field at y via the per-cell scheme solve against the
/// density estimate. Exposed for testing node consistency.
double subgrid_eval(const GridField& solution, const GridField& density,
                    std::span<const double> y, const NodeSolveConfig& cfg);

/// Multilinear interpolation of node values at x (clamped to the domain).
double multilinear_eval(const GridField& field, std::span<const double> x);

} // namespace pdsort
