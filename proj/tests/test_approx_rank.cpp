#include <doctest.h>

#include <cmath>

#include "pdsort/approx_rank.hpp"
#include "pdsort/evaluation.hpp"
#include "pdsort/rng.hpp"

using namespace pdsort;

namespace {

PointCloud uniform_cloud(std::int64_t n, std::uint64_t seed) {
    return sample_case(make_analytic_case(AnalyticCaseId::f1_uniform, 2), n, seed);
}

RankerConfig unit_square_config(std::int64_t nodes, std::int64_t k, std::uint64_t seed) {
    RankerConfig cfg;
    cfg.grid = GridSpec::from_shape({0.0, 0.0}, {nodes, nodes}, 1.0 / static_cast<double>(nodes - 1));
    cfg.k = k;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("subgrid evaluation at a grid node reproduces the node value") {
    auto cloud = uniform_cloud(5000, 3);
    auto spec = GridSpec::from_shape({0.0, 0.0}, {21, 21}, 0.05);
    NodeSolveConfig node_cfg;
    auto density = histogram_density(cloud, spec);
    auto solution = solve_scheme(density, node_cfg);

    std::vector<std::int64_t> idx(2);
    std::vector<double> node(2);
    for (std::int64_t flat = 0; flat < spec.node_count(); ++flat) {
        spec.unflatten(flat, idx);
        spec.node_point(idx, node);
        CHECK(subgrid_eval(solution, density, node, node_cfg) ==
              solution.values[static_cast<std::size_t>(flat)]);
    }
}

TEST_CASE("pde ranks approximate the exact solution for the uniform density") {
    auto cloud = uniform_cloud(20000, 11);
    // plant the probe point
    cloud.coords.push_back(0.25);
    cloud.coords.push_back(0.25);

    auto cfg = unit_square_config(101, cloud.size(), 1);
    auto ranks = rank_points_pde(cloud, cfg);
    const double at_probe = ranks.back();
    CHECK(std::abs(at_probe - 0.5) <= 0.12); // within O(sqrt(h)) of 2*sqrt(1/16)
}

TEST_CASE("points in the zero boundary layers rank zero") {
    auto cloud = uniform_cloud(2000, 5);
    auto cfg = unit_square_config(21, 2000, 9);
    const double h = cfg.grid.spacing;
    cloud.coords.push_back(0.5 * h);
    cloud.coords.push_back(0.7);
    cloud.coords.push_back(h);
    cloud.coords.push_back(h);
    auto ranks = rank_points_pde(cloud, cfg);
    CHECK(ranks[ranks.size() - 2] == 0.0);
    CHECK(ranks[ranks.size() - 1] == 0.0);
}

TEST_CASE("pde ranks are deterministic given the seed") {
    auto cloud = uniform_cloud(4000, 7);
    auto cfg = unit_square_config(41, 1000, 42);
    auto a = rank_points_pde(cloud, cfg);
    auto b = rank_points_pde(cloud, cfg);
    CHECK(a == b);
    cfg.seed = 43;
    auto c = rank_points_pde(cloud, cfg);
    CHECK(a != c);
}

TEST_CASE("pde ranks respect dominance on sampled comparable pairs") {
    auto cloud = uniform_cloud(20000, 13);
    auto cfg = unit_square_config(51, 10000, 2);
    auto ranks = rank_points_pde(cloud, cfg);
    const double slack = 10.0 * cfg.node.tolerance;

    Rng rng(99);
    int checked = 0;
    for (int trial = 0; trial < 40000 && checked < 10000; ++trial) {
        const auto i = static_cast<std::int64_t>(rng.next_below(20000));
        const auto j = static_cast<std::int64_t>(rng.next_below(20000));
        if (i == j) continue;
        if (!pareto_leq(cloud.point(i), cloud.point(j))) continue;
        ++checked;
        CHECK(ranks[static_cast<std::size_t>(i)] <=
              ranks[static_cast<std::size_t>(j)] + slack);
    }
    CHECK(checked >= 5000);
}

TEST_CASE("pairwise order is invariant under positive affine rescaling") {
    auto cloud = uniform_cloud(5000, 17);
    auto cfg = unit_square_config(41, 2000, 21);
    auto ranks = rank_points_pde(cloud, cfg);

    const double scale = 3.5;
    const std::vector<double> shift{-2.0, 5.0};
    PointCloud mapped;
    mapped.dim = 2;
    mapped.coords.resize(cloud.coords.size());
    for (std::int64_t i = 0; i < cloud.size(); ++i)
        for (int a = 0; a < 2; ++a)
            mapped.coords[static_cast<std::size_t>(2 * i + a)] =
                scale * cloud.point(i)[a] + shift[static_cast<std::size_t>(a)];

    auto mapped_cfg = cfg;
    mapped_cfg.grid = GridSpec::from_shape(
        {scale * 0.0 + shift[0], scale * 0.0 + shift[1]}, {41, 41}, scale * cfg.grid.spacing);
    auto mapped_ranks = rank_points_pde(mapped, mapped_cfg);

    Rng rng(1);
    for (int trial = 0; trial < 20000; ++trial) {
        const auto i = static_cast<std::int64_t>(rng.next_below(5000));
        const auto j = static_cast<std::int64_t>(rng.next_below(5000));
        const double da = ranks[static_cast<std::size_t>(i)] - ranks[static_cast<std::size_t>(j)];
        const double db = mapped_ranks[static_cast<std::size_t>(i)] -
                          mapped_ranks[static_cast<std::size_t>(j)];
        if (std::abs(da) <= 1e-9 || std::abs(db) <= 1e-9) continue;
        CHECK(da * db > 0.0);
    }
}

TEST_CASE("equalize h-rule balances the error terms and clamps tiny grids") {
    RankerConfig cfg;
    cfg.grid = GridSpec::from_shape({0.0, 0.0}, {5, 5}, 0.25);
    cfg.k = 1000000;
    cfg.h_rule = RankerConfig::HRule::equalize;
    auto grid = ranker_grid(cfg);
    CHECK(grid.spacing == doctest::Approx(std::pow(1e6, -1.0 / 6.0)));
    CHECK(grid.shape[0] >= 10);

    cfg.k = 64; // rule value 0.5 would leave a degenerate grid
    auto clamped = ranker_grid(cfg);
    CHECK(clamped.spacing <= 1.0 / 9.0 + 1e-12);
    CHECK(clamped.shape[0] >= 10);
}

TEST_CASE("subset ranking on an antichain gives rank one everywhere") {
    std::vector<double> coords;
    for (int i = 0; i < 200; ++i) {
        const double t = static_cast<double>(i) / 199.0;
        coords.push_back(t);
        coords.push_back(1.0 - t);
    }
    PointCloud cloud(2, std::move(coords));
    auto cfg = unit_square_config(21, 200, 3);
    auto ranks = rank_points_subset(cloud, cfg);
    for (double r : ranks) CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("subset ranking is exact for node-aligned one-point cells") {
    // one point per cell, each sitting exactly on its cell's node
    auto spec = GridSpec::from_shape({0.0, 0.0}, {8, 8}, 0.125);
    std::vector<double> coords;
    for (std::int64_t i = 0; i < 8; ++i)
        for (std::int64_t j = 0; j < 8; ++j) {
            coords.push_back(spec.node_coord(0, i));
            coords.push_back(spec.node_coord(1, j));
        }
    PointCloud cloud(2, std::move(coords));

    RankerConfig cfg;
    cfg.grid = spec;
    cfg.k = cloud.size();
    cfg.seed = 1;
    auto approx = rank_points_subset(cloud, cfg);
    auto exact = nondominated_sort_2d(cloud);
    for (std::size_t i = 0; i < approx.size(); ++i)
        CHECK(approx[i] == doctest::Approx(exact[i]).epsilon(1e-12));
}

TEST_CASE("subset ranking fills empty cells deterministically") {
    auto cloud = uniform_cloud(3000, 23);
    RankerConfig cfg = unit_square_config(31, 40, 8); // 40 samples on a 31x31 grid
    auto a = rank_points_subset(cloud, cfg);
    auto b = rank_points_subset(cloud, cfg);
    CHECK(a == b);
    for (double r : a) CHECK(r >= 1.0 - 1e-12);
}

TEST_CASE("pde ranking beats subset ranking at small k") {
    auto cloud = uniform_cloud(30000, 29);
    auto exact = nondominated_sort_2d(cloud);
    auto cfg = unit_square_config(61, 800, 4);

    auto pde = rank_points_pde(cloud, cfg);
    auto subset = rank_points_subset(cloud, cfg);
    const auto acc_pde = accuracy_montecarlo(exact, pde, 200000, 5, 99);
    const auto acc_subset = accuracy_montecarlo(exact, subset, 200000, 5, 99);
    CHECK(acc_pde.mean > 0.9);
    CHECK(acc_pde.mean >= acc_subset.mean - (acc_pde.ci95 + acc_subset.ci95));
}
