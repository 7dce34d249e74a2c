#include "pdsort/approx_rank.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

namespace pdsort {

namespace {

constexpr int kMaxDim = 10; // corner tables are 2^d entries
constexpr double kNodeSnap = 1e-9;

std::int64_t raw_floor_index(double x, double lo, double spacing) {
    const double s = (x - lo) / spacing;
    double f = std::floor(s);
    if (s - f > 1.0 - kNodeSnap) f += 1.0;
    return static_cast<std::int64_t>(f);
}

bool in_zero_layer(const GridSpec& spec, std::span<const double> y) {
    for (int a = 0; a < spec.dim; ++a) {
        const double edge = spec.lo[static_cast<std::size_t>(a)] + spec.spacing;
        if (y[a] <= edge + kNodeSnap * spec.spacing) return true;
    }
    return false;
}

// Runs fn over [0, n) in parallel, propagating the first exception.
template <typename Fn>
void parallel_for_points(std::int64_t n, Exec exec, Fn&& fn) {
    if (exec == Exec::serial) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr error = nullptr;
    std::atomic<bool> failed{false};
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            fn(i);
        } catch (...) {
#pragma omp critical
            {
                if (!failed.exchange(true)) error = std::current_exception();
            }
        }
    }
    if (error) std::rethrow_exception(error);
}

} // namespace

GridSpec ranker_grid(const RankerConfig& cfg) {
    if (cfg.h_rule == RankerConfig::HRule::explicit_spacing) return cfg.grid;
    if (cfg.k < 1) throw DomainError("ranker_grid: k must be positive for the equalize rule");
    const double d = static_cast<double>(cfg.grid.dim);
    double spacing = std::pow(static_cast<double>(cfg.k), -1.0 / (2.0 * (d + 1.0)));
    double min_extent = std::numeric_limits<double>::infinity();
    for (int a = 0; a < cfg.grid.dim; ++a)
        min_extent = std::min(min_extent, cfg.grid.hi[static_cast<std::size_t>(a)] -
                                              cfg.grid.lo[static_cast<std::size_t>(a)]);
    // Keep at least 8 interior nodes per axis; tiny k would otherwise
    // degenerate the grid.
    spacing = std::min(spacing, min_extent / 9.0);
    return GridSpec::from_corners(cfg.grid.lo, cfg.grid.hi, spacing);
}

double subgrid_eval(const GridField& solution, const GridField& density,
                    std::span<const double> y, const NodeSolveConfig& cfg) {
    const GridSpec& spec = solution.spec;
    const int d = spec.dim;
    if (d > kMaxDim) throw std::invalid_argument("subgrid_eval: dimension too large");

    if (in_zero_layer(spec, y)) return 0.0;

    // Upper corner of the cell that has y on or inside it; y exactly on a
    // node makes that node the corner, reproducing the node equation.
    std::int64_t upper[kMaxDim];
    double sub_spacing[kMaxDim];
    for (int a = 0; a < d; ++a) {
        const double lo = spec.lo[static_cast<std::size_t>(a)];
        const std::int64_t j = raw_floor_index(y[a], lo, spec.spacing);
        const double node = lo + spec.spacing * static_cast<double>(j);
        if (std::abs(y[a] - node) <= kNodeSnap * spec.spacing) {
            upper[a] = j;
            sub_spacing[a] = spec.spacing;
        } else {
            upper[a] = j + 1;
            sub_spacing[a] = y[a] - node;
        }
        if (upper[a] > spec.shape[static_cast<std::size_t>(a)] - 1)
            throw DomainError("subgrid_eval: point outside the grid domain");
    }

    // Corner values of the cell [upper - spacing, upper].
    double corner[1 << kMaxDim];
    const int corners = 1 << d;
    std::int64_t base_flat = 0;
    for (int a = 0; a < d; ++a)
        base_flat += (upper[a] - 1) * spec.strides[static_cast<std::size_t>(a)];
    for (int mask = 0; mask < corners; ++mask) {
        std::int64_t flat = base_flat;
        for (int a = 0; a < d; ++a)
            if (mask & (1 << a)) flat += spec.strides[static_cast<std::size_t>(a)];
        corner[mask] = solution.values[static_cast<std::size_t>(flat)];
    }

    // Backward value on each lower face: multilinear interpolation over the
    // face's corners with weights from the sub-cell offsets.
    double weight[kMaxDim];
    for (int a = 0; a < d; ++a) weight[a] = sub_spacing[a] / spec.spacing;
    double backward[kMaxDim];
    for (int axis = 0; axis < d; ++axis) {
        double value = 0.0;
        for (int mask = 0; mask < corners; ++mask) {
            if (mask & (1 << axis)) continue;
            double w = 1.0;
            for (int a = 0; a < d; ++a) {
                if (a == axis) continue;
                w *= (mask & (1 << a)) ? weight[a] : 1.0 - weight[a];
            }
            value += w * corner[mask];
        }
        backward[axis] = value;
    }

    std::int64_t upper_flat = 0;
    for (int a = 0; a < d; ++a)
        upper_flat += upper[a] * spec.strides[static_cast<std::size_t>(a)];
    double rhs = density.values[static_cast<std::size_t>(upper_flat)];
    for (int a = 0; a < d; ++a) rhs *= sub_spacing[a];

    return local_solve_rhs({backward, static_cast<std::size_t>(d)}, rhs, cfg);
}

DepthVector rank_points_pde(const PointCloud& cloud, const RankerConfig& cfg, Exec exec) {
    if (cloud.dim != cfg.grid.dim)
        throw std::invalid_argument("rank_points_pde: dimension mismatch");
    const GridSpec grid = ranker_grid(cfg);
    const PointCloud picked = subsample(cloud, SubsampleSpec{cfg.k, cfg.seed});
    const GridField density = histogram_density(picked, grid, exec);
    const GridField solution = solve_scheme(density, cfg.node, exec);

    DepthVector ranks(static_cast<std::size_t>(cloud.size()), 0.0);
    parallel_for_points(cloud.size(), exec, [&](std::int64_t i) {
        ranks[static_cast<std::size_t>(i)] = subgrid_eval(solution, density, cloud.point(i), cfg.node);
    });
    return ranks;
}

double multilinear_eval(const GridField& field, std::span<const double> x) {
    const GridSpec& spec = field.spec;
    const int d = spec.dim;
    if (d > kMaxDim) throw std::invalid_argument("multilinear_eval: dimension too large");

    std::int64_t base[kMaxDim];
    double weight[kMaxDim];
    for (int a = 0; a < d; ++a) {
        const double lo = spec.lo[static_cast<std::size_t>(a)];
        std::int64_t j = raw_floor_index(x[a], lo, spec.spacing);
        if (j < 0 || j > spec.shape[static_cast<std::size_t>(a)] - 1)
            throw DomainError("multilinear_eval: point outside the grid domain");
        j = std::min(j, spec.shape[static_cast<std::size_t>(a)] - 2);
        base[a] = j;
        const double node = lo + spec.spacing * static_cast<double>(j);
        weight[a] = std::clamp((x[a] - node) / spec.spacing, 0.0, 1.0);
    }

    std::int64_t base_flat = 0;
    for (int a = 0; a < d; ++a) base_flat += base[a] * spec.strides[static_cast<std::size_t>(a)];
    const int corners = 1 << d;
    double value = 0.0;
    for (int mask = 0; mask < corners; ++mask) {
        std::int64_t flat = base_flat;
        double w = 1.0;
        for (int a = 0; a < d; ++a) {
            if (mask & (1 << a)) {
                flat += spec.strides[static_cast<std::size_t>(a)];
                w *= weight[a];
            } else {
                w *= 1.0 - weight[a];
            }
        }
        value += w * field.values[static_cast<std::size_t>(flat)];
    }
    return value;
}

namespace {

// Fills empty cells with the value of the nearest nonempty cell in Chebyshev
// distance; ties go to the smallest row-major index. Chamfer-style sweeps
// over the 3^d - 1 neighborhood until the (distance, source) labels settle.
void fill_empty_cells(const GridSpec& spec, std::vector<double>& values,
                      const std::vector<bool>& occupied) {
    const int d = spec.dim;
    const std::int64_t count = spec.node_count();

    std::vector<std::int64_t> dist(static_cast<std::size_t>(count),
                                   std::numeric_limits<std::int64_t>::max() / 2);
    std::vector<std::int64_t> src(static_cast<std::size_t>(count), -1);
    bool any_occupied = false;
    for (std::int64_t i = 0; i < count; ++i) {
        if (occupied[static_cast<std::size_t>(i)]) {
            dist[static_cast<std::size_t>(i)] = 0;
            src[static_cast<std::size_t>(i)] = i;
            any_occupied = true;
        }
    }
    if (!any_occupied) throw DomainError("subset ranking: no occupied grid cell");

    // Neighbor offsets as index deltas.
    std::vector<std::vector<int>> neighbor_steps;
    {
        std::vector<int> step(static_cast<std::size_t>(d), -1);
        while (true) {
            bool all_zero = true;
            for (int v : step) all_zero = all_zero && v == 0;
            if (!all_zero) neighbor_steps.push_back(step);
            int a = d - 1;
            for (; a >= 0; --a) {
                if (++step[static_cast<std::size_t>(a)] <= 1) break;
                step[static_cast<std::size_t>(a)] = -1;
            }
            if (a < 0) break;
        }
    }

    std::vector<std::int64_t> idx(static_cast<std::size_t>(d));
    auto relax_from = [&](std::int64_t flat) {
        bool changed = false;
        spec.unflatten(flat, idx);
        for (const auto& step : neighbor_steps) {
            std::int64_t nb = flat;
            bool ok = true;
            for (int a = 0; a < d; ++a) {
                const std::int64_t j = idx[static_cast<std::size_t>(a)] + step[static_cast<std::size_t>(a)];
                if (j < 0 || j >= spec.shape[static_cast<std::size_t>(a)]) {
                    ok = false;
                    break;
                }
                nb += step[static_cast<std::size_t>(a)] * spec.strides[static_cast<std::size_t>(a)];
            }
            if (!ok) continue;
            const std::int64_t cand_dist = dist[static_cast<std::size_t>(nb)] + 1;
            const std::int64_t cand_src = src[static_cast<std::size_t>(nb)];
            if (cand_src < 0) continue;
            auto& cur_dist = dist[static_cast<std::size_t>(flat)];
            auto& cur_src = src[static_cast<std::size_t>(flat)];
            if (cand_dist < cur_dist || (cand_dist == cur_dist && cand_src < cur_src)) {
                cur_dist = cand_dist;
                cur_src = cand_src;
                changed = true;
            }
        }
        return changed;
    };

    for (int round = 0; round < 1024; ++round) {
        bool changed = false;
        for (std::int64_t flat = 0; flat < count; ++flat)
            if (dist[static_cast<std::size_t>(flat)] != 0) changed |= relax_from(flat);
        for (std::int64_t flat = count - 1; flat >= 0; --flat)
            if (dist[static_cast<std::size_t>(flat)] != 0) changed |= relax_from(flat);
        if (!changed) break;
    }

    for (std::int64_t i = 0; i < count; ++i)
        if (!occupied[static_cast<std::size_t>(i)])
            values[static_cast<std::size_t>(i)] = values[static_cast<std::size_t>(src[static_cast<std::size_t>(i)])];
}

} // namespace

DepthVector rank_points_subset(const PointCloud& cloud, const RankerConfig& cfg, Exec exec) {
    if (cloud.dim != cfg.grid.dim)
        throw std::invalid_argument("rank_points_subset: dimension mismatch");
    const GridSpec grid = ranker_grid(cfg);
    const PointCloud picked = subsample(cloud, SubsampleSpec{cfg.k, cfg.seed});
    const DepthVector sub_depths = nondominated_sort(picked, SortMethod::automatic);

    // Average the subsample ranks per forward cell.
    const std::int64_t count = grid.node_count();
    std::vector<double> sums(static_cast<std::size_t>(count), 0.0);
    std::vector<std::int64_t> cell_count(static_cast<std::size_t>(count), 0);
    std::vector<std::int64_t> idx(static_cast<std::size_t>(grid.dim));
    for (std::int64_t i = 0; i < picked.size(); ++i) {
        floor_to_grid(picked.point(i), grid, idx);
        const std::int64_t flat = grid.flatten(idx);
        sums[static_cast<std::size_t>(flat)] += sub_depths[static_cast<std::size_t>(i)];
        ++cell_count[static_cast<std::size_t>(flat)];
    }
    GridField node_ranks(grid);
    std::vector<bool> occupied(static_cast<std::size_t>(count), false);
    for (std::int64_t i = 0; i < count; ++i) {
        if (cell_count[static_cast<std::size_t>(i)] > 0) {
            node_ranks.values[static_cast<std::size_t>(i)] =
                sums[static_cast<std::size_t>(i)] / static_cast<double>(cell_count[static_cast<std::size_t>(i)]);
            occupied[static_cast<std::size_t>(i)] = true;
        }
    }
    fill_empty_cells(grid, node_ranks.values, occupied);

    DepthVector ranks(static_cast<std::size_t>(cloud.size()), 0.0);
    parallel_for_points(cloud.size(), exec, [&](std::int64_t i) {
        ranks[static_cast<std::size_t>(i)] = multilinear_eval(node_ranks, cloud.point(i));
    });
    return ranks;
}

} // namespace pdsort
