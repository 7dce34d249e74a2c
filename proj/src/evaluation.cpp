#include "pdsort/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "pdsort/rng.hpp"

namespace pdsort {

namespace {

double product(std::span<const double> x) {
    double p = 1.0;
    for (double v : x) p *= v;
    return p;
}

double ninth_power_sum(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) {
        const double v3 = v * v * v;
        s += v3 * v3 * v3;
    }
    return s;
}

} // namespace

double AnalyticCase::density(std::span<const double> x) const {
    const double d = static_cast<double>(dim);
    switch (id) {
    case AnalyticCaseId::f1_uniform:
        return 1.0;
    case AnalyticCaseId::f2_gaussian: {
        double norm2 = 0.0;
        for (double v : x) norm2 += v * v;
        return std::pow(2.0, d) / std::pow(std::numbers::pi, d / 2.0) * std::exp(-norm2);
    }
    case AnalyticCaseId::f3_punctured: {
        for (double v : x)
            if (v > 0.5) return 1.0;
        return 0.0;
    }
    case AnalyticCaseId::f4_nonconvex: {
        const double s = ninth_power_sum(x);
        if (s == 0.0) return 0.0;
        double value = std::pow(s, 1.0 - d);
        for (double v : x) {
            const double v3 = v * v * v;
            value *= 9.0 * v3 * v3 * v3 + s;
        }
        return value;
    }
    }
    return 0.0;
}

double AnalyticCase::solution(std::span<const double> x) const {
    const double d = static_cast<double>(dim);
    switch (id) {
    case AnalyticCaseId::f1_uniform:
        return d * std::pow(product(x), 1.0 / d);
    case AnalyticCaseId::f2_gaussian: {
        double p = 1.0;
        for (double v : x) p *= std::erf(v);
        return d * std::pow(p, 1.0 / d);
    }
    case AnalyticCaseId::f3_punctured: {
        double best = 0.0;
        for (int i = 0; i < dim; ++i) {
            double term = std::max(0.0, x[static_cast<std::size_t>(i)] - 0.5);
            for (int j = 0; j < dim; ++j)
                if (j != i) term *= x[static_cast<std::size_t>(j)];
            best = std::max(best, term);
        }
        return d * std::pow(best, 1.0 / d);
    }
    case AnalyticCaseId::f4_nonconvex:
        return d * std::pow(product(x) * ninth_power_sum(x), 1.0 / d);
    }
    return 0.0;
}

bool AnalyticCase::separable_unit_mass() const {
    return id == AnalyticCaseId::f1_uniform || id == AnalyticCaseId::f2_gaussian;
}

double AnalyticCase::density_bound() const {
    const double d = static_cast<double>(dim);
    switch (id) {
    case AnalyticCaseId::f1_uniform:
        return 1.0;
    case AnalyticCaseId::f2_gaussian:
        return std::pow(2.0, d) / std::pow(std::numbers::pi, d / 2.0);
    case AnalyticCaseId::f3_punctured:
        return 1.0;
    case AnalyticCaseId::f4_nonconvex:
        // Maximum over [0,1]^d sits at the all-ones corner.
        return std::pow(d, 1.0 - d) * std::pow(9.0 + d, d);
    }
    return 1.0;
}

AnalyticCase make_analytic_case(AnalyticCaseId id, int dim) {
    if (dim < 1) throw std::invalid_argument("analytic case dimension must be >= 1");
    AnalyticCase c;
    c.id = id;
    c.dim = dim;
    switch (id) {
    case AnalyticCaseId::f1_uniform: c.name = "f1"; break;
    case AnalyticCaseId::f2_gaussian: c.name = "f2"; break;
    case AnalyticCaseId::f3_punctured: c.name = "f3"; break;
    case AnalyticCaseId::f4_nonconvex: c.name = "f4"; break;
    }
    return c;
}

AnalyticCase make_analytic_case(const std::string& name, int dim) {
    if (name == "f1") return make_analytic_case(AnalyticCaseId::f1_uniform, dim);
    if (name == "f2") return make_analytic_case(AnalyticCaseId::f2_gaussian, dim);
    if (name == "f3") return make_analytic_case(AnalyticCaseId::f3_punctured, dim);
    if (name == "f4") return make_analytic_case(AnalyticCaseId::f4_nonconvex, dim);
    throw std::invalid_argument("unknown analytic case '" + name + "' (expected f1..f4)");
}

std::pair<double, double> analytic_eval(const AnalyticCase& c, std::span<const double> x) {
    for (double v : x)
        if (v < 0.0) throw DomainError("analytic_eval: coordinates must be nonnegative");
    return {c.density(x), c.solution(x)};
}

GridField density_grid(const AnalyticCase& c, const GridSpec& spec) {
    if (c.dim != spec.dim) throw std::invalid_argument("density_grid: dimension mismatch");
    GridField field(spec);
    std::vector<std::int64_t> idx(static_cast<std::size_t>(spec.dim), 0);
    std::vector<double> node(static_cast<std::size_t>(spec.dim));
    const std::int64_t count = spec.node_count();
    for (std::int64_t flat = 0; flat < count; ++flat) {
        spec.node_point(idx, node);
        field.values[static_cast<std::size_t>(flat)] = c.density(node);
        for (int a = spec.dim - 1; a >= 0; --a) {
            if (++idx[static_cast<std::size_t>(a)] < spec.shape[static_cast<std::size_t>(a)]) break;
            idx[static_cast<std::size_t>(a)] = 0;
        }
    }
    return field;
}

double erf_inverse(double u) {
    if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("erf_inverse: u must be in [0,1)");
    if (u == 0.0) return 0.0;
    // Winitzki's approximation as the seed, then Newton on std::erf.
    const double a = 0.147;
    const double log1mu2 = std::log1p(-u * u);
    const double t = 2.0 / (std::numbers::pi * a) + 0.5 * log1mu2;
    double x = std::sqrt(std::sqrt(t * t - log1mu2 / a) - t);
    const double sqrt_pi_over_2 = std::sqrt(std::numbers::pi) / 2.0;
    for (int it = 0; it < 4; ++it) {
        const double err = std::erf(x) - u;
        if (err == 0.0) break;
        x -= err * sqrt_pi_over_2 * std::exp(x * x);
    }
    return x;
}

PointCloud sample_case(const AnalyticCase& c, std::int64_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_case: n must be positive");
    Rng rng(seed);
    PointCloud cloud;
    cloud.dim = c.dim;

    if (c.separable_unit_mass()) {
        cloud.coords.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(c.dim));
        const bool gaussian = c.id == AnalyticCaseId::f2_gaussian;
        for (std::int64_t i = 0; i < n; ++i)
            for (int a = 0; a < c.dim; ++a) {
                const double u = rng.next_double();
                cloud.coords.push_back(gaussian ? erf_inverse(u) : u);
            }
        return cloud;
    }

    // Thinning: candidates uniform on [0,1]^d with acceptance density / bound,
    // scaled so the kept process has intensity n * density.
    const double bound = c.density_bound();
    const auto candidates = static_cast<std::int64_t>(std::llround(std::ceil(
        static_cast<double>(n) * bound)));
    std::vector<double> x(static_cast<std::size_t>(c.dim));
    for (std::int64_t i = 0; i < candidates; ++i) {
        for (int a = 0; a < c.dim; ++a) x[static_cast<std::size_t>(a)] = rng.next_double();
        const double f = c.density(x);
        bool accept;
        if (f <= 0.0)
            accept = false;
        else if (f >= bound)
            accept = true;
        else
            accept = rng.next_double() * bound < f;
        if (accept) cloud.coords.insert(cloud.coords.end(), x.begin(), x.end());
    }
    if (cloud.coords.empty())
        throw DomainError("sample_case: thinning produced no points; increase n");
    return cloud;
}

double accuracy_exact(std::span<const double> ranks_a, std::span<const double> ranks_b,
                      Exec exec) {
    if (ranks_a.size() != ranks_b.size())
        throw std::invalid_argument("accuracy_exact: length mismatch");
    const auto n = static_cast<std::int64_t>(ranks_a.size());
    if (n < 2) throw std::invalid_argument("accuracy_exact: need at least two ranks");

    std::int64_t ordered = 0;
    if (exec == Exec::serial) {
        for (std::int64_t i = 0; i < n; ++i)
            for (std::int64_t j = i + 1; j < n; ++j) {
                const double da = ranks_a[static_cast<std::size_t>(i)] - ranks_a[static_cast<std::size_t>(j)];
                const double db = ranks_b[static_cast<std::size_t>(i)] - ranks_b[static_cast<std::size_t>(j)];
                if (da * db > 0.0) ++ordered;
            }
    } else {
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : ordered)
        for (std::int64_t i = 0; i < n; ++i)
            for (std::int64_t j = i + 1; j < n; ++j) {
                const double da = ranks_a[static_cast<std::size_t>(i)] - ranks_a[static_cast<std::size_t>(j)];
                const double db = ranks_b[static_cast<std::size_t>(i)] - ranks_b[static_cast<std::size_t>(j)];
                if (da * db > 0.0) ++ordered;
            }
    }
    return 2.0 * static_cast<double>(ordered) /
           (static_cast<double>(n) * static_cast<double>(n - 1));
}

AccuracyEstimate accuracy_montecarlo(std::span<const double> ranks_a,
                                     std::span<const double> ranks_b,
                                     std::int64_t pairs, int reps, std::uint64_t seed,
                                     Exec exec) {
    if (ranks_a.size() != ranks_b.size())
        throw std::invalid_argument("accuracy_montecarlo: length mismatch");
    const auto n = static_cast<std::uint64_t>(ranks_a.size());
    if (n < 2) throw std::invalid_argument("accuracy_montecarlo: need at least two ranks");
    if (pairs < 1) throw std::invalid_argument("accuracy_montecarlo: pairs must be positive");
    if (reps < 1) throw std::invalid_argument("accuracy_montecarlo: reps must be positive");

    AccuracyEstimate est;
    est.rep_estimates.assign(static_cast<std::size_t>(reps), 0.0);

    auto run_rep = [&](std::int64_t r) {
        Rng rng(derive_stream(seed, static_cast<std::uint64_t>(r)));
        std::int64_t ordered = 0;
        for (std::int64_t p = 0; p < pairs; ++p) {
            const auto i = rng.next_below(n);
            auto j = rng.next_below(n - 1);
            if (j >= i) ++j;
            const double da = ranks_a[i] - ranks_a[j];
            const double db = ranks_b[i] - ranks_b[j];
            if (da * db > 0.0) ++ordered;
        }
        est.rep_estimates[static_cast<std::size_t>(r)] =
            static_cast<double>(ordered) / static_cast<double>(pairs);
    };

    if (exec == Exec::serial) {
        for (std::int64_t r = 0; r < reps; ++r) run_rep(r);
    } else {
#pragma omp parallel for schedule(static)
        for (std::int64_t r = 0; r < reps; ++r) run_rep(r);
    }

    double mean = 0.0;
    for (double v : est.rep_estimates) mean += v;
    mean /= static_cast<double>(reps);
    est.mean = mean;
    if (reps > 1) {
        double ss = 0.0;
        for (double v : est.rep_estimates) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / static_cast<double>(reps - 1));
        est.ci95 = 1.96 * sd / std::sqrt(static_cast<double>(reps));
    }
    return est;
}

std::pair<double, double> linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("linear_fit: need two or more samples");
    const auto n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    return {slope, intercept};
}

std::string report_to_json(const ExperimentReport& report) {
    nlohmann::json j;
    j["experiment"] = report.experiment;
    j["case"] = report.case_name;
    j["dimension"] = report.dim;
    j["sizes"] = report.sizes;
    if (!report.spacings.empty()) j["spacings"] = report.spacings;
    j["l1_errors"] = report.l1_errors;
    j["linf_errors"] = report.linf_errors;
    j["alpha_l1"] = report.alpha_l1;
    j["alpha_linf"] = report.alpha_linf;
    j["intercept_l1"] = report.intercept_l1;
    j["intercept_linf"] = report.intercept_linf;
    j["reps"] = report.reps;
    j["seed"] = report.seed;
    return j.dump(2);
}

ExperimentReport pde_rate_experiment(const AnalyticCase& c,
                                     std::span<const std::int64_t> grid_sizes,
                                     const NodeSolveConfig& cfg, Exec exec) {
    if (grid_sizes.size() < 2)
        throw std::invalid_argument("pde_rate_experiment: need at least two grid sizes");
    for (std::size_t i = 1; i < grid_sizes.size(); ++i)
        if (grid_sizes[i] <= grid_sizes[i - 1])
            throw std::invalid_argument("pde_rate_experiment: sizes must be strictly increasing");

    ExperimentReport report;
    report.experiment = "pde-rate";
    report.case_name = c.name;
    report.dim = c.dim;

    std::vector<double> log_h, log_l1, log_linf;
    for (std::int64_t nodes : grid_sizes) {
        const double spacing = 1.0 / static_cast<double>(nodes - 1);
        GridSpec spec = GridSpec::from_shape(
            std::vector<double>(static_cast<std::size_t>(c.dim), 0.0),
            std::vector<std::int64_t>(static_cast<std::size_t>(c.dim), nodes), spacing);
        const GridField f = density_grid(c, spec);
        const GridField u = solve_scheme(f, cfg, exec);

        double linf = 0.0, l1 = 0.0;
        std::vector<std::int64_t> idx(static_cast<std::size_t>(c.dim), 0);
        std::vector<double> node(static_cast<std::size_t>(c.dim));
        const std::int64_t count = spec.node_count();
        for (std::int64_t flat = 0; flat < count; ++flat) {
            spec.node_point(idx, node);
            const double err = std::abs(u.values[static_cast<std::size_t>(flat)] - c.solution(node));
            linf = std::max(linf, err);
            l1 += err;
            for (int a = c.dim - 1; a >= 0; --a) {
                if (++idx[static_cast<std::size_t>(a)] < spec.shape[static_cast<std::size_t>(a)]) break;
                idx[static_cast<std::size_t>(a)] = 0;
            }
        }
        double cell = 1.0;
        for (int a = 0; a < c.dim; ++a) cell *= spacing;
        l1 *= cell;

        report.sizes.push_back(static_cast<double>(nodes));
        report.spacings.push_back(spacing);
        report.l1_errors.push_back(l1);
        report.linf_errors.push_back(linf);
        log_h.push_back(std::log(spacing));
        log_l1.push_back(std::log(l1));
        log_linf.push_back(std::log(linf));
    }

    auto [a1, b1] = linear_fit(log_h, log_l1);
    auto [a2, b2] = linear_fit(log_h, log_linf);
    report.alpha_l1 = a1;
    report.intercept_l1 = b1;
    report.alpha_linf = a2;
    report.intercept_linf = b2;
    return report;
}

ExperimentReport stochastic_rate_experiment(const AnalyticCase& c,
                                            std::span<const std::int64_t> sample_sizes,
                                            int reps, std::uint64_t seed, Exec exec) {
    if (c.dim != 2)
        throw std::invalid_argument(
            "stochastic_rate_experiment requires d = 2 (the only d > 1 with a "
            "known chain constant)");
    if (sample_sizes.size() < 2)
        throw std::invalid_argument("stochastic_rate_experiment: need two or more sizes");
    if (reps < 1) throw std::invalid_argument("stochastic_rate_experiment: reps must be positive");

    ExperimentReport report;
    report.experiment = "stochastic-rate";
    report.case_name = c.name;
    report.dim = c.dim;
    report.reps = reps;
    report.seed = seed;

    std::vector<double> log_n, log_l1, log_linf;
    for (std::size_t si = 0; si < sample_sizes.size(); ++si) {
        const std::int64_t n = sample_sizes[si];
        std::vector<double> rep_l1(static_cast<std::size_t>(reps), 0.0);
        std::vector<double> rep_linf(static_cast<std::size_t>(reps), 0.0);

        auto run_rep = [&](std::int64_t r) {
            const std::uint64_t stream =
                derive_stream(seed, static_cast<std::uint64_t>(si) * 1024 + static_cast<std::uint64_t>(r));
            const PointCloud cloud = sample_case(c, n, stream);
            const DepthVector depths = nondominated_sort_2d(cloud);
            const double scale = 1.0 / std::sqrt(static_cast<double>(n));
            double linf = 0.0, l1 = 0.0;
            for (std::int64_t i = 0; i < cloud.size(); ++i) {
                const double v =
                    std::abs(scale * depths[static_cast<std::size_t>(i)] - c.solution(cloud.point(i)));
                linf = std::max(linf, v);
                l1 += v;
            }
            rep_l1[static_cast<std::size_t>(r)] = l1 / static_cast<double>(cloud.size());
            rep_linf[static_cast<std::size_t>(r)] = linf;
        };

        if (exec == Exec::serial) {
            for (std::int64_t r = 0; r < reps; ++r) run_rep(r);
        } else {
#pragma omp parallel for schedule(dynamic, 1)
            for (std::int64_t r = 0; r < reps; ++r) run_rep(r);
        }

        double l1 = 0.0, linf = 0.0;
        for (int r = 0; r < reps; ++r) {
            l1 += rep_l1[static_cast<std::size_t>(r)];
            linf += rep_linf[static_cast<std::size_t>(r)];
        }
        l1 /= static_cast<double>(reps);
        linf /= static_cast<double>(reps);

        report.sizes.push_back(static_cast<double>(n));
        report.l1_errors.push_back(l1);
        report.linf_errors.push_back(linf);
        log_n.push_back(std::log(static_cast<double>(n)));
        log_l1.push_back(std::log(l1));
        log_linf.push_back(std::log(linf));
    }

    auto [a1, b1] = linear_fit(log_n, log_l1);
    auto [a2, b2] = linear_fit(log_n, log_linf);
    // Errors decay like n^-alpha; report positive rates.
    report.alpha_l1 = -a1;
    report.intercept_l1 = b1;
    report.alpha_linf = -a2;
    report.intercept_linf = b2;
    return report;
}

} // namespace pdsort
