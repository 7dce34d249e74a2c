#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "pdsort/common.hpp"

namespace pdsort {

/// Uniform lattice over a hypercube: nodes lo + spacing * j for multi-index j
/// with 0 <= j[i] < shape[i]. Storage is row-major (last axis fastest) with
/// precomputed strides. `hi` is snapped onto the top node of the lattice.
struct GridSpec {
    int dim = 0;
    double spacing = 0.0;
    std::vector<double> lo;
    std::vector<double> hi;
    std::vector<std::int64_t> shape;
    std::vector<std::int64_t> strides;

    /// Builds a spec from hypercube corners; node counts per axis are
    /// floor((hi - lo) / spacing) + 1 and hi is snapped to the last node.
    static GridSpec from_corners(std::vector<double> lo, std::vector<double> hi,
                                 double spacing);

    /// Builds a spec from an explicit node count per axis.
    static GridSpec from_shape(std::vector<double> lo,
                               std::vector<std::int64_t> shape, double spacing);

    std::int64_t node_count() const;

    double node_coord(int axis, std::int64_t j) const {
        return lo[static_cast<std::size_t>(axis)] + spacing * static_cast<double>(j);
    }

    void node_point(std::span<const std::int64_t> idx, std::span<double> out) const;

    std::int64_t flatten(std::span<const std::int64_t> idx) const;
    void unflatten(std::int64_t flat, std::span<std::int64_t> idx) const;

    bool same_layout(const GridSpec& other) const;
};

/// Scalar field on a grid, one value per node, row-major.
struct GridField {
    GridSpec spec;
    std::vector<double> values;

    GridField() = default;
    explicit GridField(GridSpec s);

    double& at(std::span<const std::int64_t> idx) { return values[static_cast<std::size_t>(spec.flatten(idx))]; }
    double at(std::span<const std::int64_t> idx) const { return values[static_cast<std::size_t>(spec.flatten(idx))]; }
};

/// n points in R^d, coordinates stored row-major (point-major).
struct PointCloud {
    int dim = 0;
    std::vector<double> coords;

    PointCloud() = default;
    PointCloud(int d, std::vector<double> c);

    std::int64_t size() const {
        return dim == 0 ? 0 : static_cast<std::int64_t>(coords.size()) / dim;
    }
    std::span<const double> point(std::int64_t i) const {
        return {coords.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(dim),
                static_cast<std::size_t>(dim)};
    }
};

/// Index of the lattice cell containing x: node(j) <= x < node(j) + spacing,
/// clamped to the last node on the top faces. Coordinates within a relative
/// 1e-9 of the next node snap up to it. Throws DomainError below lo.
void floor_to_grid(std::span<const double> x, const GridSpec& spec,
                   std::span<std::int64_t> out);
std::vector<std::int64_t> floor_to_grid(std::span<const double> x,
                                        const GridSpec& spec);

/// Non-throwing variant: returns false when x lies below lo on some axis.
bool try_floor_to_grid(std::span<const double> x, const GridSpec& spec,
                       std::span<std::int64_t> out);

/// Componentwise minimum with z.
std::vector<double> project(std::span<const double> x, std::span<const double> z);

/// Componentwise partial order: true iff x[i] <= y[i] for all i.
bool pareto_leq(std::span<const double> x, std::span<const double> y);

/// True iff a <= b componentwise and a != b (strict dominance).
bool pareto_less(std::span<const double> x, std::span<const double> y);

// Binary grid container: "PDGF" magic, version, dims, shape, spacing and
// corners, then raw doubles row-major. Little-endian throughout.
void save_grid(const GridField& field, const std::filesystem::path& path);
GridField load_grid(const std::filesystem::path& path);

/// CSV export: one line per node, coordinates then value.
void export_grid_csv(const GridField& field, std::ostream& out);

// Point/rank CSV exchange used by the CLI and tests. Points: one point per
// line, comma-separated coordinates. Ranks: one value per line.
PointCloud read_points_csv(std::istream& in);
PointCloud read_points_csv(const std::filesystem::path& path);
void write_points_csv(const PointCloud& cloud, std::ostream& out);
std::vector<double> read_ranks_csv(const std::filesystem::path& path);
void write_ranks_csv(std::span<const double> ranks, std::ostream& out, bool integral);
void write_ranks_csv(std::span<const double> ranks, const std::filesystem::path& path,
                     bool integral);

} // namespace pdsort
