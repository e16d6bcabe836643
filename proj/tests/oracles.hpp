#pragma once

// Independent reference solvers used only by the tests. They share no code
// with the library's closed-form paths.

#include <span>
#include <vector>

#include "edgecache/model.hpp"

namespace oracle {

struct RoutingSolution {
    std::vector<double> y;
    double objective = 0.0;
    int iterations = 0;
};

/// Projected gradient descent with Armijo backtracking on
/// min L(y) s.t. 0 <= y <= x, starting from y = 0.
RoutingSolution pgd_routing(const edgecache::ServiceCatalog& catalog,
                            const edgecache::SlotArrivals& arrivals,
                            const edgecache::LatencyFunction& latency,
                            std::span<const double> cache, int max_iterations = 200000);

/// Dykstra's alternating projections onto the box [0,1]^N and the halfspace
/// sum <= capacity. Converges to the Euclidean projection onto their
/// intersection.
std::vector<double> dykstra_projection(std::span<const double> v, int capacity,
                                       int max_iterations = 1000000);

/// Smallest l1 distance from x to any grid point (multiples of 1/K) whose
/// units sum to `total_units`. Brute force; keep N and K small.
double min_l1_grid_distance(std::span<const double> x, int granularity, int total_units);

}  // namespace oracle
