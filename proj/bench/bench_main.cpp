// Times the OpenMP kernels against their serial reference implementations
// and verifies that both produce identical results.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pdsort/approx_rank.hpp"
#include "pdsort/density.hpp"
#include "pdsort/evaluation.hpp"
#include "pdsort/hj_solver.hpp"
#include "pdsort/rng.hpp"

using namespace pdsort;

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct Row {
    const char* kernel;
    double serial_s;
    double parallel_s;
    double max_diff;
};

void print_row(const Row& r) {
    std::printf("%-28s %10.3f ms %10.3f ms %8.2fx   max|diff| = %g\n", r.kernel,
                1e3 * r.serial_s, 1e3 * r.parallel_s, r.serial_s / r.parallel_s, r.max_diff);
}

template <typename Fn>
double timed(Fn&& fn) {
    const double t0 = now_seconds();
    fn();
    return now_seconds() - t0;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

int main(int argc, char** argv) {
    int scale = 1;
    if (argc > 1) scale = std::max(1, std::atoi(argv[1]));
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (OpenMP disabled)\n");
#endif
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    {
        auto c = make_analytic_case(AnalyticCaseId::f4_nonconvex, 2);
        const std::int64_t nodes = 500 * scale;
        auto spec = GridSpec::from_shape({0.0, 0.0}, {nodes, nodes},
                                         1.0 / static_cast<double>(nodes - 1));
        auto f = density_grid(c, spec);
        NodeSolveConfig cfg; // bisection
        GridField us, up;
        Row row{"solve_scheme d=2 bisect", 0, 0, 0};
        row.serial_s = timed([&] { us = solve_scheme(f, cfg, Exec::serial); });
        row.parallel_s = timed([&] { up = solve_scheme(f, cfg, Exec::parallel); });
        row.max_diff = max_abs_diff(us.values, up.values);
        print_row(row);
    }
    {
        auto c = make_analytic_case(AnalyticCaseId::f1_uniform, 3);
        const std::int64_t nodes = 64 * scale;
        auto spec = GridSpec::from_shape({0.0, 0.0, 0.0}, {nodes, nodes, nodes},
                                         1.0 / static_cast<double>(nodes - 1));
        auto f = density_grid(c, spec);
        NodeSolveConfig cfg;
        GridField us, up;
        Row row{"solve_scheme d=3 bisect", 0, 0, 0};
        row.serial_s = timed([&] { us = solve_scheme(f, cfg, Exec::serial); });
        row.parallel_s = timed([&] { up = solve_scheme(f, cfg, Exec::parallel); });
        row.max_diff = max_abs_diff(us.values, up.values);
        print_row(row);
    }
    {
        auto cloud = sample_case(make_analytic_case(AnalyticCaseId::f1_uniform, 2),
                                 4000000 * scale, 7);
        auto spec = GridSpec::from_shape({0.0, 0.0}, {250, 250}, 1.0 / 249.0);
        GridField hs, hp;
        Row row{"histogram_density 4e6 pts", 0, 0, 0};
        row.serial_s = timed([&] { hs = histogram_density(cloud, spec, Exec::serial); });
        row.parallel_s = timed([&] { hp = histogram_density(cloud, spec, Exec::parallel); });
        row.max_diff = max_abs_diff(hs.values, hp.values);
        print_row(row);
    }
    {
        auto cloud = sample_case(make_analytic_case(AnalyticCaseId::f1_uniform, 2),
                                 1000000 * scale, 9);
        RankerConfig cfg;
        cfg.grid = GridSpec::from_shape({0.0, 0.0}, {100, 100}, 1.0 / 99.0);
        cfg.k = 100000;
        cfg.seed = 3;
        DepthVector rs, rp;
        Row row{"rank_points_pde 1e6 pts", 0, 0, 0};
        row.serial_s = timed([&] { rs = rank_points_pde(cloud, cfg, Exec::serial); });
        row.parallel_s = timed([&] { rp = rank_points_pde(cloud, cfg, Exec::parallel); });
        row.max_diff = max_abs_diff(rs, rp);
        print_row(row);
    }
    {
        Rng rng(11);
        std::vector<double> a(static_cast<std::size_t>(15000) * scale), b(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = rng.next_double();
            b[i] = a[i] + 0.05 * (rng.next_double() - 0.5);
        }
        double es = 0, ep = 0;
        Row row{"accuracy_exact n=15k", 0, 0, 0};
        row.serial_s = timed([&] { es = accuracy_exact(a, b, Exec::serial); });
        row.parallel_s = timed([&] { ep = accuracy_exact(a, b, Exec::parallel); });
        row.max_diff = std::abs(es - ep);
        print_row(row);
    }
    return 0;
}
