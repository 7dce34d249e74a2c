#include "pdsort/exact_sort.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pdsort {

DepthVector longest_chain_depths(const PointCloud& cloud) {
    const std::int64_t n = cloud.size();
    if (n < 1) throw std::invalid_argument("longest_chain_depths: empty cloud");

    // Any lexicographic order is a linear extension of the partial order, so
    // a single DP pass over sorted points sees all dominators first.
    std::vector<std::int64_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
        auto pa = cloud.point(a), pb = cloud.point(b);
        return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
    });

    DepthVector depths(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t pos = 0; pos < n; ++pos) {
        const std::int64_t i = order[static_cast<std::size_t>(pos)];
        const auto pi = cloud.point(i);
        double best = 0.0;
        for (std::int64_t q = 0; q < pos; ++q) {
            const std::int64_t j = order[static_cast<std::size_t>(q)];
            if (depths[static_cast<std::size_t>(j)] <= best) continue;
            if (pareto_less(cloud.point(j), pi)) best = depths[static_cast<std::size_t>(j)];
        }
        depths[static_cast<std::size_t>(i)] = best + 1.0;
    }
    return depths;
}

DepthVector nondominated_sort_2d(const PointCloud& cloud) {
    if (cloud.dim != 2)
        throw std::invalid_argument("nondominated_sort_2d supports d = 2 only");
    const std::int64_t n = cloud.size();
    if (n < 1) throw std::invalid_argument("nondominated_sort_2d: empty cloud");

    std::vector<std::int64_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
        auto pa = cloud.point(a), pb = cloud.point(b);
        if (pa[0] != pb[0]) return pa[0] < pb[0];
        return pa[1] < pb[1];
    });

    // envelope[k] = minimal second coordinate among processed points of depth
    // k + 1; it is nondecreasing in k, so each query is a binary search.
    std::vector<double> envelope;
    envelope.reserve(64);
    DepthVector depths(static_cast<std::size_t>(n), 0.0);

    std::int64_t pos = 0;
    while (pos < n) {
        // Exact duplicates form one group: they get equal depth and are
        // excluded from dominating each other.
        std::int64_t end = pos + 1;
        const auto p = cloud.point(order[static_cast<std::size_t>(pos)]);
        while (end < n) {
            const auto q = cloud.point(order[static_cast<std::size_t>(end)]);
            if (q[0] != p[0] || q[1] != p[1]) break;
            ++end;
        }
        const double y = p[1];
        const auto level = static_cast<std::size_t>(
            std::upper_bound(envelope.begin(), envelope.end(), y) - envelope.begin());
        for (std::int64_t q = pos; q < end; ++q)
            depths[static_cast<std::size_t>(order[static_cast<std::size_t>(q)])] =
                static_cast<double>(level + 1);
        if (level == envelope.size())
            envelope.push_back(y);
        else
            envelope[level] = y;
        pos = end;
    }
    return depths;
}

DepthVector nondominated_sort(const PointCloud& cloud, SortMethod method) {
    switch (method) {
    case SortMethod::brute_force:
        return longest_chain_depths(cloud);
    case SortMethod::fast_2d:
        return nondominated_sort_2d(cloud);
    case SortMethod::automatic:
    default:
        return cloud.dim == 2 ? nondominated_sort_2d(cloud) : longest_chain_depths(cloud);
    }
}

std::vector<std::vector<std::int64_t>> pareto_fronts(const DepthVector& depths) {
    std::int64_t max_depth = 0;
    for (double d : depths) {
        if (!(d >= 1.0) || d != std::floor(d))
            throw std::invalid_argument("pareto_fronts requires integral depths >= 1");
        max_depth = std::max(max_depth, static_cast<std::int64_t>(d));
    }
    std::vector<std::vector<std::int64_t>> fronts(static_cast<std::size_t>(max_depth));
    for (std::size_t i = 0; i < depths.size(); ++i)
        fronts[static_cast<std::size_t>(depths[i]) - 1].push_back(static_cast<std::int64_t>(i));
    return fronts;
}

} // namespace pdsort
