#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "pdsort/grid.hpp"
#include "pdsort/rng.hpp"

using namespace pdsort;

TEST_CASE("floor_to_grid basics") {
    auto spec = GridSpec::from_corners({0.0, 0.0}, {1.0, 1.0}, 0.5);
    CHECK(spec.shape == std::vector<std::int64_t>{3, 3});

    CHECK(floor_to_grid(std::vector{0.0, 0.0}, spec) == std::vector<std::int64_t>{0, 0});
    CHECK(floor_to_grid(std::vector{0.74, 0.25}, spec) == std::vector<std::int64_t>{1, 0});
    // hi exactly maps to the last node on every axis
    CHECK(floor_to_grid(std::vector{1.0, 1.0}, spec) == std::vector<std::int64_t>{2, 2});
    CHECK_THROWS_AS(floor_to_grid(std::vector{-0.1, 0.0}, spec), DomainError);
}

TEST_CASE("floor_to_grid inverts node coordinates") {
    auto spec = GridSpec::from_corners({-0.3, 0.7, 2.0}, {1.1, 2.0, 3.0}, 0.1);
    Rng rng(7);
    std::vector<std::int64_t> idx(3), back(3);
    std::vector<double> x(3);
    for (int trial = 0; trial < 500; ++trial) {
        for (int a = 0; a < 3; ++a)
            idx[a] = static_cast<std::int64_t>(rng.next_below(
                static_cast<std::uint64_t>(spec.shape[a])));
        spec.node_point(idx, x);
        floor_to_grid(x, spec, back);
        CHECK(back == idx);
    }
}

TEST_CASE("project") {
    CHECK(project(std::vector{3.0, 0.2}, std::vector{1.0, 1.0}) == std::vector{1.0, 0.2});
    CHECK(project(std::vector{0.5, 0.5}, std::vector{1.0, 1.0}) == std::vector{0.5, 0.5});
    CHECK(project(std::vector{2.0, 2.0}, std::vector{1.0, 1.0}) == std::vector{1.0, 1.0});

    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x{rng.next_double() * 4, rng.next_double() * 4};
        std::vector<double> z{rng.next_double() * 4, rng.next_double() * 4};
        auto once = project(x, z);
        CHECK(project(once, z) == once); // idempotent
    }
}

TEST_CASE("pareto_leq is a partial order") {
    CHECK(pareto_leq(std::vector{1.0, 2.0}, std::vector{1.0, 3.0}));
    CHECK_FALSE(pareto_leq(std::vector{1.0, 2.0}, std::vector{2.0, 1.0}));
    CHECK(pareto_leq(std::vector{1.0, 2.0}, std::vector{1.0, 2.0}));
    CHECK_THROWS_AS(pareto_leq(std::vector{1.0}, std::vector{1.0, 2.0}),
                    std::invalid_argument);

    Rng rng(3);
    auto rand_point = [&] {
        return std::vector<double>{rng.next_double(), rng.next_double(), rng.next_double()};
    };
    for (int trial = 0; trial < 500; ++trial) {
        auto x = rand_point(), y = rand_point(), z = rand_point();
        CHECK(pareto_leq(x, x));
        if (pareto_leq(x, y) && pareto_leq(y, x)) CHECK(x == y);
        if (pareto_leq(x, y) && pareto_leq(y, z)) CHECK(pareto_leq(x, z));
    }
}

TEST_CASE("grid spec validation") {
    CHECK_THROWS_AS(GridSpec::from_corners({0.0}, {1.0}, -0.5), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec::from_corners({1.0}, {0.0}, 0.5), std::invalid_argument);
    // two nodes per axis are not enough for the zero boundary layers
    CHECK_THROWS_AS(GridSpec::from_corners({0.0}, {1.0}, 0.9), std::invalid_argument);
}

TEST_CASE("grid binary container round trip") {
    auto spec = GridSpec::from_shape({0.0, 0.25}, {5, 7}, 0.125);
    GridField field(spec);
    Rng rng(99);
    for (auto& v : field.values) v = rng.next_double() * 10 - 5;

    const auto path = std::filesystem::temp_directory_path() / "pdsort_grid_test.bin";
    save_grid(field, path);
    auto loaded = load_grid(path);
    CHECK(loaded.spec.same_layout(field.spec));
    CHECK(loaded.values == field.values);
    std::filesystem::remove(path);
}

TEST_CASE("grid csv export lists every node") {
    auto spec = GridSpec::from_shape({0.0, 0.0}, {3, 4}, 0.5);
    GridField field(spec);
    field.values[5] = 2.5;
    std::ostringstream out;
    export_grid_csv(field, out);
    std::istringstream in(out.str());
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 12);
}

TEST_CASE("points csv round trip") {
    PointCloud cloud(2, {0.125, 3.0, -1.5, 0.0625, 10.0, 2.0});
    std::ostringstream out;
    write_points_csv(cloud, out);
    std::istringstream in(out.str());
    auto back = read_points_csv(in);
    CHECK(back.dim == cloud.dim);
    CHECK(back.coords == cloud.coords);

    std::istringstream bad("1.0,2.0\n3.0\n");
    CHECK_THROWS_AS(read_points_csv(bad), DomainError);
}
