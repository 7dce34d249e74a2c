#pragma once

#include <cstdint>

#include "pdsort/common.hpp"
#include "pdsort/grid.hpp"

namespace pdsort {

/// Random subsample request: k points drawn uniformly without replacement,
/// deterministic for a fixed seed.
struct SubsampleSpec {
    std::int64_t k = 0;
    std::uint64_t seed = 0;
};

PointCloud subsample(const PointCloud& cloud, const SubsampleSpec& spec);

/// Histogram density estimate aligned to the grid: each node carries the
/// sample count of its forward cell [node, node + spacing) scaled by
/// 1 / (k * spacing^d). Cells are half-open so the counts partition the
/// sample; the top faces are closed. Throws DomainError listing offenders
/// if samples fall outside [lo, hi].
GridField histogram_density(const PointCloud& sample, const GridSpec& spec,
                            Exec exec = Exec::parallel);

/// Grid covering the cloud's bounding box expanded by one cell on every side,
/// with `nodes` nodes along the longest axis.
GridSpec auto_fit_grid(const PointCloud& cloud, std::int64_t nodes);

} // namespace pdsort
