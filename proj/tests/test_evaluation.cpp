#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pdsort/evaluation.hpp"
#include "pdsort/rng.hpp"

using namespace pdsort;

namespace {

// Composite Simpson rule, the independent quadrature oracle for erf and the
// separable-solution identity.
double simpson(double a, double b, int intervals, double (*fn)(double)) {
    if (intervals % 2 != 0) ++intervals;
    const double step = (b - a) / intervals;
    double sum = fn(a) + fn(b);
    for (int i = 1; i < intervals; ++i)
        sum += fn(a + step * i) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * step / 3.0;
}

double gauss_kernel(double t) { return 2.0 / std::sqrt(std::numbers::pi) * std::exp(-t * t); }
double one_kernel(double) { return 1.0; }

} // namespace

TEST_CASE("analytic_eval pinned values") {
    auto f1 = make_analytic_case(AnalyticCaseId::f1_uniform, 2);
    auto [d1, u1] = analytic_eval(f1, std::vector{1.0, 1.0});
    CHECK(d1 == 1.0);
    CHECK(u1 == doctest::Approx(2.0).epsilon(1e-15));

    auto f3 = make_analytic_case(AnalyticCaseId::f3_punctured, 2);
    auto [d3, u3] = analytic_eval(f3, std::vector{0.5, 0.9});
    CHECK(d3 == 1.0); // boundary of the punctured block, outside [0,1/2]^2
    CHECK(u3 == doctest::Approx(2.0 * std::sqrt(0.2)).epsilon(1e-14));
    CHECK(f3.density(std::vector{0.5, 0.5}) == 0.0);
    CHECK(f3.density(std::vector{0.2, 0.4}) == 0.0);

    auto f2 = make_analytic_case(AnalyticCaseId::f2_gaussian, 2);
    auto [d2, u2] = analytic_eval(f2, std::vector{0.0, 0.0});
    CHECK(d2 == doctest::Approx(4.0 / std::numbers::pi).epsilon(1e-15));
    CHECK(u2 == 0.0);

    CHECK_THROWS_AS(analytic_eval(f1, std::vector{-0.5, 0.2}), DomainError);
}

TEST_CASE("erf meets its accuracy contract against quadrature") {
    for (double x = 0.0; x <= 3.0; x += 0.0625) {
        const double reference = simpson(0.0, x, 4096, gauss_kernel);
        CHECK(std::abs(std::erf(x) - reference) <= 1.5e-7);
    }
}

TEST_CASE("erf_inverse inverts erf to high accuracy") {
    for (double u = 0.0; u < 0.999; u += 0.001) {
        const double x = erf_inverse(u);
        CHECK(std::erf(x) == doctest::Approx(u).epsilon(1e-12));
    }
    CHECK(erf_inverse(0.0) == 0.0);
    CHECK_THROWS_AS(erf_inverse(1.0), std::invalid_argument);
}

TEST_CASE("separable densities satisfy the integral identity") {
    // d * (integral over [0,x] of f)^(1/d) equals the closed-form solution
    for (int dim : {2, 3}) {
        auto c1 = make_analytic_case(AnalyticCaseId::f1_uniform, dim);
        auto c2 = make_analytic_case(AnalyticCaseId::f2_gaussian, dim);
        Rng rng(314);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> x(static_cast<std::size_t>(dim));
            for (auto& v : x) v = 0.05 + 1.5 * rng.next_double();

            double box1 = 1.0, box2 = 1.0;
            for (double v : x) {
                box1 *= simpson(0.0, v, 512, one_kernel);
                box2 *= simpson(0.0, v, 512, gauss_kernel);
            }
            const double d = static_cast<double>(dim);
            CHECK(d * std::pow(box1, 1.0 / d) ==
                  doctest::Approx(c1.solution(x)).epsilon(1e-6));
            CHECK(d * std::pow(box2, 1.0 / d) ==
                  doctest::Approx(c2.solution(x)).epsilon(1e-6));
        }
    }
}

TEST_CASE("closed-form solutions satisfy the product equation") {
    // central finite differences of the stated solutions multiply back to
    // the stated densities
    Rng rng(159);
    const double eps = 1e-6;
    for (auto id : {AnalyticCaseId::f1_uniform, AnalyticCaseId::f2_gaussian,
                    AnalyticCaseId::f3_punctured, AnalyticCaseId::f4_nonconvex}) {
        auto c = make_analytic_case(id, 2);
        int tested = 0;
        while (tested < 40) {
            std::vector<double> x{0.1 + 0.85 * rng.next_double(),
                                  0.1 + 0.85 * rng.next_double()};
            // keep clear of the f3 shock line x1 = x2 and its block corner
            if (id == AnalyticCaseId::f3_punctured) {
                if (std::abs(x[0] - x[1]) < 0.1) continue;
                if (x[0] <= 0.55 && x[1] <= 0.55) continue;
            }
            ++tested;
            double grad_product = 1.0;
            for (int a = 0; a < 2; ++a) {
                auto lo = x, hi = x;
                lo[static_cast<std::size_t>(a)] -= eps;
                hi[static_cast<std::size_t>(a)] += eps;
                grad_product *= (c.solution(hi) - c.solution(lo)) / (2.0 * eps);
            }
            CHECK(grad_product == doctest::Approx(c.density(x)).epsilon(5e-4));
        }
    }
}

TEST_CASE("accuracy_exact pinned examples") {
    CHECK(accuracy_exact(std::vector{1.0, 2.0, 3.0}, std::vector{1.0, 2.0, 3.0}) == 1.0);
    CHECK(accuracy_exact(std::vector{1.0, 2.0, 3.0}, std::vector{-1.0, -2.0, -3.0}) == 0.0);
    // ties in either vector count as unordered
    CHECK(accuracy_exact(std::vector{1.0, 1.0, 2.0}, std::vector{1.0, 2.0, 3.0}) ==
          doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(accuracy_exact(std::vector{1.0}, std::vector{1.0, 2.0}),
                    std::invalid_argument);
}

TEST_CASE("accuracy is invariant under increasing relabelings") {
    Rng rng(5);
    std::vector<double> a(400), b(400);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = rng.next_double() * 10;
        b[i] = a[i] + (rng.next_double() - 0.3);
    }
    const double base = accuracy_exact(a, b);
    std::vector<double> ga(a.size()), hb(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ga[i] = a[i] * a[i] * a[i] + 2.0 * a[i];
        hb[i] = std::exp(0.5 * b[i]);
    }
    CHECK(accuracy_exact(ga, hb) == base);
    CHECK(accuracy_exact(a, a) == 1.0);
}

TEST_CASE("monte carlo accuracy estimates the exact metric") {
    Rng rng(8);
    std::vector<double> a(5000), b(5000);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = rng.next_double();
        b[i] = a[i] + 0.2 * (rng.next_double() - 0.5);
    }
    const double exact = accuracy_exact(a, b);

    auto est = accuracy_montecarlo(a, b, 5000, 200, 77);
    const double se = est.ci95 / 1.96;
    CHECK(std::abs(est.mean - exact) <= 3.0 * se);

    auto rerun = accuracy_montecarlo(a, b, 5000, 200, 77);
    CHECK(est.rep_estimates == rerun.rep_estimates); // deterministic stream

    std::vector<double> distinct{0.0, 1.0, 2.0, 3.0};
    auto perfect = accuracy_montecarlo(distinct, distinct, 100, 10, 5);
    CHECK(perfect.mean == 1.0);
    CHECK(perfect.ci95 == 0.0);
}

TEST_CASE("sampling produces the advertised point processes") {
    auto uni = sample_case(make_analytic_case(AnalyticCaseId::f1_uniform, 2), 5000, 31);
    CHECK(uni.size() == 5000);
    for (double v : uni.coords) {
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }

    auto punct = sample_case(make_analytic_case(AnalyticCaseId::f3_punctured, 2), 40000, 32);
    for (std::int64_t i = 0; i < punct.size(); ++i) {
        const auto p = punct.point(i);
        CHECK((p[0] > 0.5 || p[1] > 0.5)); // the block [0,1/2]^2 is empty
    }
    // kept count is Binomial(n, 3/4): stay within six sigma
    const double mean = 40000 * 0.75, sd = std::sqrt(40000 * 0.75 * 0.25);
    CHECK(std::abs(static_cast<double>(punct.size()) - mean) <= 6.0 * sd);

    auto gauss = sample_case(make_analytic_case(AnalyticCaseId::f2_gaussian, 2), 20000, 33);
    CHECK(gauss.size() == 20000);
    double mean_cdf = 0.0;
    for (double v : gauss.coords) {
        CHECK(v >= 0.0);
        mean_cdf += std::erf(v);
    }
    mean_cdf /= static_cast<double>(gauss.coords.size());
    // erf(X) is uniform on [0,1): mean 1/2 within CLT fluctuation
    CHECK(std::abs(mean_cdf - 0.5) <= 5.0 / std::sqrt(12.0 * 40000.0));
}

TEST_CASE("linear_fit recovers an exact line") {
    std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    std::vector<double> y{-0.5, 1.5, 3.5, 5.5};
    auto [slope, intercept] = linear_fit(x, y);
    CHECK(slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(intercept == doctest::Approx(-2.5).epsilon(1e-12));
}

TEST_CASE("pde rate harness reports decaying errors") {
    auto c = make_analytic_case(AnalyticCaseId::f1_uniform, 2);
    NodeSolveConfig cfg;
    cfg.method = NodeSolveConfig::Method::closed_form_2d;
    const std::vector<std::int64_t> sizes{26, 51, 101};
    auto report = pde_rate_experiment(c, sizes, cfg);
    REQUIRE(report.l1_errors.size() == 3);
    CHECK(report.l1_errors[2] < report.l1_errors[0]);
    CHECK(report.linf_errors[2] < report.linf_errors[0]);
    CHECK(report.alpha_linf > 0.2);
    CHECK(report.alpha_linf < 0.9);
    CHECK(report.alpha_l1 > report.alpha_linf);

    const auto json = report_to_json(report);
    CHECK(json.find("\"alpha_l1\"") != std::string::npos);
    CHECK(json.find("\"pde-rate\"") != std::string::npos);
}

TEST_CASE("numerical solution stays below the exact one in three dimensions") {
    auto c = make_analytic_case(AnalyticCaseId::f1_uniform, 3);
    NodeSolveConfig cfg; // bisection
    auto spec = GridSpec::from_shape({0.0, 0.0, 0.0}, {50, 50, 50}, 1.0 / 49.0);
    auto u = solve_scheme(density_grid(c, spec), cfg);
    const double slack = 150.0 * cfg.tolerance; // error compounds along index chains
    std::vector<std::int64_t> idx(3);
    std::vector<double> node(3);
    for (std::int64_t flat = 0; flat < spec.node_count(); ++flat) {
        spec.unflatten(flat, idx);
        spec.node_point(idx, node);
        CHECK(u.values[static_cast<std::size_t>(flat)] <= c.solution(node) + slack);
    }
}

TEST_CASE("stochastic rate harness decays with the sample count") {
    auto c = make_analytic_case(AnalyticCaseId::f3_punctured, 2);
    const std::vector<std::int64_t> sizes{2000, 64000};
    auto report = stochastic_rate_experiment(c, sizes, 3, 2024);
    REQUIRE(report.l1_errors.size() == 2);
    CHECK(report.l1_errors[1] < report.l1_errors[0]);
    CHECK(report.linf_errors[1] < report.linf_errors[0]);
    CHECK(report.alpha_l1 > 0.0);
    CHECK(report.alpha_linf > 0.0);

    auto c3 = make_analytic_case(AnalyticCaseId::f3_punctured, 3);
    CHECK_THROWS_AS(stochastic_rate_experiment(c3, sizes, 2, 1), std::invalid_argument);
}
