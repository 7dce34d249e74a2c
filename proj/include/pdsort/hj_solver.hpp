#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pdsort/common.hpp"
#include "pdsort/grid.hpp"

namespace pdsort {

/// Per-node root-find configuration for the upwind scheme. The node equation
///   prod_i (t - a_i) = h^d * f,  t >= max_i a_i,
/// has a unique admissible root bracketed in [m, m + h f^(1/d)], m = max a_i.
struct NodeSolveConfig {
    enum class Method { closed_form_2d, binary_search, newton_safeguarded };

    Method method = Method::binary_search;
    double tolerance = 1e-6; // absolute, on the node value
    int max_iterations = 200;
};

/// Worst re-substitution residual |S(h, x, U) - f(x)| over interior nodes.
struct SchemeResidualReport {
    double max_abs_residual = 0.0;
    std::vector<std::int64_t> location;
};

/// Solves prod_i (t - backward[i]) = rhs for the unique t >= max backward.
/// rhs is the cell volume times the density value.
double local_solve_rhs(std::span<const double> backward, double rhs,
                       const NodeSolveConfig& cfg);

/// Node update of the upwind scheme: unique t >= max_i backward[i] with
/// prod_i (t - backward[i]) = spacing^d * density. Exact fast path when
/// density == 0 (returns the max backward value).
double local_solve(std::span<const double> backward, double spacing, double density,
                   const NodeSolveConfig& cfg);

/// Solves the discrete scheme on the density's grid: the two lowest index
/// layers per axis are the zero boundary; every other node is visited once in
/// an order that respects the componentwise partial order. The parallel path
/// sweeps anti-diagonal hyperplanes (sum of indices constant) with a barrier
/// between them and is bit-identical to the serial lexicographic sweep.
GridField solve_scheme(const GridField& density, const NodeSolveConfig& cfg,
                       Exec exec = Exec::parallel);

/// Piecewise-constant extension: value at the node floor_to_grid(x).
/// Throws DomainError outside [lo, hi].
double extend_eval(const GridField& field, std::span<const double> x);

/// True iff the extended field equals its projection onto [lo, z] at every
/// node, exactly. Holds whenever the scheme's source is supported in [lo, z].
bool check_truncation(const GridField& field, std::span<const double> z);

/// Re-substitutes a solved field into the scheme against its density.
SchemeResidualReport scheme_residual(const GridField& solution, const GridField& density);

/// Calibrated residual acceptance bound for a solved field:
/// 10 * tolerance * max(1, density_max)^((d-1)/d) / spacing.
double residual_bound(const GridSpec& spec, const NodeSolveConfig& cfg, double density_max);

} // namespace pdsort
