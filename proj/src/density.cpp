#include "pdsort/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "pdsort/rng.hpp"

namespace pdsort {

PointCloud subsample(const PointCloud& cloud, const SubsampleSpec& spec) {
    const std::int64_t n = cloud.size();
    if (spec.k < 1 || spec.k > n)
        throw DomainError("subsample: k must satisfy 1 <= k <= n (k = " +
                          std::to_string(spec.k) + ", n = " + std::to_string(n) + ")");

    // Seeded shuffle-prefix: k steps of Fisher-Yates give a uniform
    // without-replacement draw.
    std::vector<std::int64_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(spec.seed);
    for (std::int64_t i = 0; i < spec.k; ++i) {
        const std::int64_t j =
            i + static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(n - i)));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }

    PointCloud out;
    out.dim = cloud.dim;
    out.coords.resize(static_cast<std::size_t>(spec.k) * static_cast<std::size_t>(cloud.dim));
    for (std::int64_t i = 0; i < spec.k; ++i) {
        const auto p = cloud.point(order[static_cast<std::size_t>(i)]);
        std::copy(p.begin(), p.end(),
                  out.coords.begin() + static_cast<std::ptrdiff_t>(i) * cloud.dim);
    }
    return out;
}

GridField histogram_density(const PointCloud& sample, const GridSpec& spec, Exec exec) {
    if (sample.dim != spec.dim)
        throw std::invalid_argument("histogram_density: dimension mismatch");
    const std::int64_t n = sample.size();
    if (n < 1) throw DomainError("histogram_density: empty sample");
    const std::int64_t nodes = spec.node_count();

    // Resolve every sample to its cell up front; the error can then list the
    // offenders and the counting loops cannot throw.
    std::vector<std::int64_t> flats(static_cast<std::size_t>(n));
    std::string offenders;
    int offender_count = 0;
    {
        std::vector<std::int64_t> idx(static_cast<std::size_t>(spec.dim));
        for (std::int64_t i = 0; i < n; ++i) {
            const auto p = sample.point(i);
            bool inside = try_floor_to_grid(p, spec, idx);
            for (int a = 0; inside && a < spec.dim; ++a)
                if (p[a] > spec.hi[static_cast<std::size_t>(a)] + 1e-9 * spec.spacing)
                    inside = false;
            if (!inside) {
                if (offender_count < 8) {
                    std::ostringstream row;
                    row << (offenders.empty() ? "" : "; ") << "point " << i << " = (";
                    for (int a = 0; a < spec.dim; ++a)
                        row << p[a] << (a + 1 < spec.dim ? "," : ")");
                    offenders += row.str();
                }
                ++offender_count;
                continue;
            }
            flats[static_cast<std::size_t>(i)] = spec.flatten(idx);
        }
    }
    if (offender_count > 0) {
        std::ostringstream msg;
        msg << "histogram_density: " << offender_count
            << " sample(s) outside the grid domain: " << offenders;
        if (offender_count > 8) msg << "; ...";
        throw DomainError(msg.str());
    }

    std::vector<std::int64_t> counts(static_cast<std::size_t>(nodes), 0);

    if (exec == Exec::serial) {
        for (std::int64_t i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(flats[static_cast<std::size_t>(i)])];
    } else {
        // Sharded counting: per-thread count arrays merged by summation, so
        // the result is independent of the sharding.
#pragma omp parallel
        {
            std::vector<std::int64_t> local(static_cast<std::size_t>(nodes), 0);
#pragma omp for schedule(static) nowait
            for (std::int64_t i = 0; i < n; ++i)
                ++local[static_cast<std::size_t>(flats[static_cast<std::size_t>(i)])];
#pragma omp critical
            {
                for (std::int64_t j = 0; j < nodes; ++j)
                    counts[static_cast<std::size_t>(j)] += local[static_cast<std::size_t>(j)];
            }
        }
    }

    double cell_volume = 1.0;
    for (int a = 0; a < spec.dim; ++a) cell_volume *= spec.spacing;
    const double scale = 1.0 / (static_cast<double>(n) * cell_volume);

    GridField field(spec);
    for (std::int64_t j = 0; j < nodes; ++j)
        field.values[static_cast<std::size_t>(j)] =
            static_cast<double>(counts[static_cast<std::size_t>(j)]) * scale;
    return field;
}

GridSpec auto_fit_grid(const PointCloud& cloud, std::int64_t nodes) {
    if (nodes < 4) throw std::invalid_argument("auto_fit_grid: need at least 4 nodes");
    const int d = cloud.dim;
    std::vector<double> mins(static_cast<std::size_t>(d), std::numeric_limits<double>::infinity());
    std::vector<double> maxs(static_cast<std::size_t>(d), -std::numeric_limits<double>::infinity());
    for (std::int64_t i = 0; i < cloud.size(); ++i) {
        const auto p = cloud.point(i);
        for (int a = 0; a < d; ++a) {
            mins[static_cast<std::size_t>(a)] = std::min(mins[static_cast<std::size_t>(a)], p[a]);
            maxs[static_cast<std::size_t>(a)] = std::max(maxs[static_cast<std::size_t>(a)], p[a]);
        }
    }
    double span = 0.0;
    for (int a = 0; a < d; ++a)
        span = std::max(span, maxs[static_cast<std::size_t>(a)] - mins[static_cast<std::size_t>(a)]);
    if (span == 0.0) span = 1.0; // degenerate cloud: a single distinct location
    const double spacing = span / static_cast<double>(nodes - 3);

    std::vector<double> lo(static_cast<std::size_t>(d));
    std::vector<std::int64_t> shape(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        lo[static_cast<std::size_t>(a)] = mins[static_cast<std::size_t>(a)] - spacing;
        const double extent =
            maxs[static_cast<std::size_t>(a)] - mins[static_cast<std::size_t>(a)] + 2.0 * spacing;
        shape[static_cast<std::size_t>(a)] =
            std::max<std::int64_t>(3, static_cast<std::int64_t>(std::ceil(extent / spacing - 1e-9)) + 1);
    }
    return GridSpec::from_shape(std::move(lo), std::move(shape), spacing);
}

} // namespace pdsort
