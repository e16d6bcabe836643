#pragma once

#include <span>
#include <vector>

#include "edgecache/model.hpp"

namespace edgecache {

/// Euclidean projection onto {x : 0 <= x_n <= 1, sum_n x_n <= capacity}.
///
/// Clips first; if the clipped point already satisfies the budget it is the
/// projection. Otherwise the budget is tight and the answer is
/// x_n = clamp(v_n - tau, 0, 1) with tau found by sweeping the 2N sorted
/// breakpoints of the piecewise-linear sum. O(N log N).
CacheVector project_capped_box_simplex(std::span<const double> v, int capacity);

/// Lazy-projection online gradient descent state: theta accumulates the
/// negated subgradients, x is the projection of eta * theta.
struct CacherState {
    std::vector<double> theta;
    CacheVector x;
    double eta = 0.05;

    /// theta = 0, x = 0.
    static CacherState initial(std::size_t n_services, double eta);
};

CacherState caching_update(const CacherState& state, std::span<const double> subgradient,
                           int capacity);

}  // namespace edgecache
