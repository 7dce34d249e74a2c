#include "pdsort/hj_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pdsort {

namespace {

double product_minus(std::span<const double> a, double t) {
    double p = 1.0;
    for (double v : a) p *= (t - v);
    return p;
}

double solve_closed_form_2d(double a0, double a1, double rhs) {
    const double diff = a0 - a1;
    return 0.5 * (a0 + a1) + 0.5 * std::sqrt(diff * diff + 4.0 * rhs);
}

double solve_bisection(std::span<const double> a, double rhs, double lo, double hi,
                       const NodeSolveConfig& cfg) {
    int iterations = 0;
    while (hi - lo > cfg.tolerance) {
        if (++iterations > cfg.max_iterations)
            throw DomainError("local_solve: iteration budget exhausted before the "
                              "bracket shrank below tolerance");
        const double mid = 0.5 * (lo + hi);
        if (product_minus(a, mid) < rhs)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Newton from the right bracket endpoint; g(t) = prod(t - a_i) - rhs is
// increasing and convex on [max a_i, inf), so the iterates descend onto the
// root. Bisection step whenever Newton leaves the bracket.
double solve_newton(std::span<const double> a, double rhs, double lo, double hi,
                    const NodeSolveConfig& cfg) {
    double t = hi;
    for (int it = 0; it < cfg.max_iterations; ++it) {
        double g = 1.0, dg = 0.0;
        for (double v : a) {
            dg = dg * (t - v) + g;
            g *= (t - v);
        }
        g -= rhs;
        if (g < 0.0)
            lo = t;
        else
            hi = t;
        if (hi - lo <= cfg.tolerance) return 0.5 * (lo + hi);
        double next = (dg > 0.0) ? t - g / dg : lo;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        t = next;
    }
    throw DomainError("local_solve: iteration budget exhausted before the "
                      "bracket shrank below tolerance");
}

} // namespace

double local_solve_rhs(std::span<const double> backward, double rhs,
                       const NodeSolveConfig& cfg) {
    const int d = static_cast<int>(backward.size());
    if (d < 1) throw std::invalid_argument("local_solve: empty neighbor list");
    double m = backward[0];
    for (double v : backward) {
        if (!std::isfinite(v)) throw DomainError("local_solve: non-finite neighbor value");
        m = std::max(m, v);
    }
    if (!std::isfinite(rhs) || rhs < 0.0)
        throw DomainError("local_solve: right-hand side must be finite and nonnegative");
    if (rhs == 0.0) return m;

    if (cfg.method == NodeSolveConfig::Method::closed_form_2d) {
        if (d != 2)
            throw std::invalid_argument("closed_form_2d node solver requires d = 2");
        return solve_closed_form_2d(backward[0], backward[1], rhs);
    }

    const double width = std::pow(rhs, 1.0 / d);
    const double lo = m, hi = m + width;
    if (cfg.method == NodeSolveConfig::Method::newton_safeguarded)
        return solve_newton(backward, rhs, lo, hi, cfg);
    return solve_bisection(backward, rhs, lo, hi, cfg);
}

double local_solve(std::span<const double> backward, double spacing, double density,
                   const NodeSolveConfig& cfg) {
    if (!(spacing > 0.0)) throw std::invalid_argument("local_solve: spacing must be positive");
    double rhs = density;
    for (std::size_t i = 0; i < backward.size(); ++i) rhs *= spacing;
    return local_solve_rhs(backward, rhs, cfg);
}

namespace {

constexpr int kMaxDim = 16;

// Gathers the d backward neighbor values of the node at `flat`.
inline void gather_backward(const GridField& u, std::int64_t flat, int d,
                            const std::int64_t* strides, double* out) {
    for (int a = 0; a < d; ++a) out[a] = u.values[static_cast<std::size_t>(flat - strides[a])];
}

void validate_density(const GridField& density) {
    for (std::size_t i = 0; i < density.values.size(); ++i) {
        const double v = density.values[i];
        if (!(v >= 0.0) || !std::isfinite(v)) {
            std::vector<std::int64_t> idx(static_cast<std::size_t>(density.spec.dim));
            density.spec.unflatten(static_cast<std::int64_t>(i), idx);
            std::ostringstream msg;
            msg << "density must be nonnegative and finite; offending node (";
            for (int a = 0; a < density.spec.dim; ++a)
                msg << idx[static_cast<std::size_t>(a)] << (a + 1 < density.spec.dim ? "," : ")");
            throw DomainError(msg.str());
        }
    }
}

} // namespace

GridField solve_scheme(const GridField& density, const NodeSolveConfig& cfg, Exec exec) {
    const GridSpec& spec = density.spec;
    const int d = spec.dim;
    if (d > kMaxDim) throw std::invalid_argument("solve_scheme: dimension too large");
    validate_density(density);

    GridField u(spec);

    const std::int64_t* strides = spec.strides.data();

    if (exec == Exec::serial) {
        // Reference sweep: ascending lexicographic index order, which is a
        // linear extension of the componentwise partial order.
        double backward[kMaxDim];
        std::vector<std::int64_t> idx(static_cast<std::size_t>(d), 0);
        const std::int64_t count = spec.node_count();
        for (std::int64_t flat = 0; flat < count; ++flat) {
            bool interior = true;
            for (int a = 0; a < d; ++a) interior = interior && idx[static_cast<std::size_t>(a)] >= 2;
            if (interior) {
                gather_backward(u, flat, d, strides, backward);
                u.values[static_cast<std::size_t>(flat)] = local_solve(
                    {backward, static_cast<std::size_t>(d)}, spec.spacing,
                    density.values[static_cast<std::size_t>(flat)], cfg);
            }
            for (int a = d - 1; a >= 0; --a) {
                if (++idx[static_cast<std::size_t>(a)] < spec.shape[static_cast<std::size_t>(a)]) break;
                idx[static_cast<std::size_t>(a)] = 0;
            }
        }
        return u;
    }

    // Parallel sweep over anti-diagonal hyperplanes: all nodes with equal
    // index sum depend only on strictly smaller sums, so each level is a
    // data-parallel batch. Bucket interior nodes by level once.
    std::int64_t min_level = 0, max_level = 0;
    for (int a = 0; a < d; ++a) {
        min_level += 2;
        max_level += spec.shape[static_cast<std::size_t>(a)] - 1;
    }
    const std::int64_t levels = max_level - min_level + 1;

    std::vector<std::int64_t> level_counts(static_cast<std::size_t>(levels) + 1, 0);
    std::vector<std::int64_t> idx(static_cast<std::size_t>(d), 0);
    const std::int64_t count = spec.node_count();
    std::vector<std::int64_t> node_level(static_cast<std::size_t>(count), -1);
    {
        std::fill(idx.begin(), idx.end(), 0);
        for (std::int64_t flat = 0; flat < count; ++flat) {
            bool interior = true;
            std::int64_t sum = 0;
            for (int a = 0; a < d; ++a) {
                interior = interior && idx[static_cast<std::size_t>(a)] >= 2;
                sum += idx[static_cast<std::size_t>(a)];
            }
            if (interior) {
                node_level[static_cast<std::size_t>(flat)] = sum - min_level;
                ++level_counts[static_cast<std::size_t>(sum - min_level)];
            }
            for (int a = d - 1; a >= 0; --a) {
                if (++idx[static_cast<std::size_t>(a)] < spec.shape[static_cast<std::size_t>(a)]) break;
                idx[static_cast<std::size_t>(a)] = 0;
            }
        }
    }
    std::vector<std::int64_t> offsets(static_cast<std::size_t>(levels) + 1, 0);
    for (std::int64_t l = 0; l < levels; ++l)
        offsets[static_cast<std::size_t>(l) + 1] =
            offsets[static_cast<std::size_t>(l)] + level_counts[static_cast<std::size_t>(l)];
    std::vector<std::int64_t> bucket(static_cast<std::size_t>(offsets[static_cast<std::size_t>(levels)]));
    {
        std::vector<std::int64_t> cursor(offsets.begin(), offsets.end() - 1);
        for (std::int64_t flat = 0; flat < count; ++flat) {
            const std::int64_t l = node_level[static_cast<std::size_t>(flat)];
            if (l >= 0) bucket[static_cast<std::size_t>(cursor[static_cast<std::size_t>(l)]++)] = flat;
        }
    }

    for (std::int64_t l = 0; l < levels; ++l) {
        const std::int64_t begin = offsets[static_cast<std::size_t>(l)];
        const std::int64_t end = offsets[static_cast<std::size_t>(l) + 1];
#pragma omp parallel for schedule(static)
        for (std::int64_t b = begin; b < end; ++b) {
            double backward[kMaxDim];
            const std::int64_t flat = bucket[static_cast<std::size_t>(b)];
            gather_backward(u, flat, d, strides, backward);
            u.values[static_cast<std::size_t>(flat)] = local_solve(
                {backward, static_cast<std::size_t>(d)}, spec.spacing,
                density.values[static_cast<std::size_t>(flat)], cfg);
        }
    }
    return u;
}

double extend_eval(const GridField& field, std::span<const double> x) {
    const GridSpec& spec = field.spec;
    for (int a = 0; a < spec.dim; ++a) {
        if (x[static_cast<std::size_t>(a)] >
            spec.hi[static_cast<std::size_t>(a)] + 1e-9 * spec.spacing) {
            std::ostringstream msg;
            msg << "extend_eval: coordinate " << x[static_cast<std::size_t>(a)] << " on axis "
                << a << " lies above the grid corner " << spec.hi[static_cast<std::size_t>(a)];
            throw DomainError(msg.str());
        }
    }
    std::int64_t idx[kMaxDim];
    floor_to_grid(x, spec, {idx, static_cast<std::size_t>(spec.dim)});
    return field.values[static_cast<std::size_t>(
        spec.flatten({idx, static_cast<std::size_t>(spec.dim)}))];
}

bool check_truncation(const GridField& field, std::span<const double> z) {
    const GridSpec& spec = field.spec;
    const int d = spec.dim;
    std::vector<std::int64_t> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> node(static_cast<std::size_t>(d));
    const std::int64_t count = spec.node_count();
    for (std::int64_t flat = 0; flat < count; ++flat) {
        spec.node_point(idx, node);
        const auto projected = project(node, z);
        if (extend_eval(field, projected) != field.values[static_cast<std::size_t>(flat)])
            return false;
        for (int a = d - 1; a >= 0; --a) {
            if (++idx[static_cast<std::size_t>(a)] < spec.shape[static_cast<std::size_t>(a)]) break;
            idx[static_cast<std::size_t>(a)] = 0;
        }
    }
    return true;
}

SchemeResidualReport scheme_residual(const GridField& solution, const GridField& density) {
    const GridSpec& spec = solution.spec;
    if (!spec.same_layout(density.spec))
        throw std::invalid_argument("scheme_residual: grid layout mismatch");
    const int d = spec.dim;
    const std::int64_t* strides = spec.strides.data();

    SchemeResidualReport report;
    report.location.assign(static_cast<std::size_t>(d), 0);

    std::vector<std::int64_t> idx(static_cast<std::size_t>(d), 0);
    double backward[kMaxDim];
    const std::int64_t count = spec.node_count();
    for (std::int64_t flat = 0; flat < count; ++flat) {
        bool interior = true;
        for (int a = 0; a < d; ++a) interior = interior && idx[static_cast<std::size_t>(a)] >= 2;
        if (interior) {
            gather_backward(solution, flat, d, strides, backward);
            double s = 1.0;
            for (int a = 0; a < d; ++a)
                s *= (solution.values[static_cast<std::size_t>(flat)] - backward[a]) / spec.spacing;
            const double r = std::abs(s - density.values[static_cast<std::size_t>(flat)]);
            if (r > report.max_abs_residual) {
                report.max_abs_residual = r;
                std::copy(idx.begin(), idx.end(), report.location.begin());
            }
        }
        for (int a = d - 1; a >= 0; --a) {
            if (++idx[static_cast<std::size_t>(a)] < spec.shape[static_cast<std::size_t>(a)]) break;
            idx[static_cast<std::size_t>(a)] = 0;
        }
    }
    return report;
}

double residual_bound(const GridSpec& spec, const NodeSolveConfig& cfg, double density_max) {
    const double d = static_cast<double>(spec.dim);
    const double scale = std::pow(std::max(1.0, density_max), (d - 1.0) / d);
    return 10.0 * cfg.tolerance * scale / spec.spacing;
}

} // namespace pdsort
