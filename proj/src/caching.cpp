#include "edgecache/caching.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edgecache {

namespace {

double clip01(double v) { return std::min(1.0, std::max(0.0, v)); }

struct Breakpoint {
    double tau;
    bool enters;  // true at v_n - 1 (x_n leaves 1), false at v_n (x_n reaches 0)
};

// tau > 0 with sum_n clamp(v_n - tau, 0, 1) == budget, given the sum at tau = 0
// exceeds budget.
double find_shift(std::span<const double> v, double budget) {
    std::vector<Breakpoint> points;
    points.reserve(2 * v.size());
    for (double vn : v) {
        points.push_back({vn - 1.0, true});
        points.push_back({vn, false});
    }
    std::sort(points.begin(), points.end(), [](const Breakpoint& a, const Breakpoint& b) {
        return a.tau < b.tau;
    });

    // Left of every breakpoint all coordinates sit at 1 and the sum is N.
    double sum = static_cast<double>(v.size());
    double prev = points.front().tau;
    std::size_t sloped = 0;
    for (const Breakpoint& p : points) {
        const double next = sum - static_cast<double>(sloped) * (p.tau - prev);
        if (next <= budget && sloped > 0) {
            return prev + (sum - budget) / static_cast<double>(sloped);
        }
        sum = next;
        prev = p.tau;
        if (p.enters) {
            ++sloped;
        } else {
            --sloped;
        }
    }
    // Sum reaches 0 past the last breakpoint; unreachable for budget >= 1.
    throw std::logic_error("capped simplex projection: shift not bracketed");
}

}  // namespace

CacheVector project_capped_box_simplex(std::span<const double> v, int capacity) {
    if (capacity < 0) throw std::invalid_argument("projection capacity must be >= 0");
    CacheVector out;
    out.x.resize(v.size());
    double sum = 0.0;
    for (std::size_t n = 0; n < v.size(); ++n) {
        if (!std::isfinite(v[n])) throw std::invalid_argument("projection input must be finite");
        out.x[n] = clip01(v[n]);
        sum += out.x[n];
    }
    const double budget = static_cast<double>(capacity);
    if (sum <= budget) return out;

    const double tau = find_shift(v, budget);
    for (std::size_t n = 0; n < v.size(); ++n) out.x[n] = clip01(v[n] - tau);
    return out;
}

CacherState CacherState::initial(std::size_t n_services, double eta) {
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw std::invalid_argument("step size eta must be >= 0");
    CacherState state;
    state.theta.assign(n_services, 0.0);
    state.x.x.assign(n_services, 0.0);
    state.eta = eta;
    return state;
}

CacherState caching_update(const CacherState& state, std::span<const double> subgradient,
                           int capacity) {
    if (subgradient.size() != state.theta.size()) {
        throw std::invalid_argument("caching_update: subgradient size mismatch");
    }
    CacherState next;
    next.eta = state.eta;
    next.theta.resize(state.theta.size());
    std::vector<double> scaled(state.theta.size());
    for (std::size_t n = 0; n < state.theta.size(); ++n) {
        if (!std::isfinite(subgradient[n])) throw std::invalid_argument("subgradient must be finite");
        next.theta[n] = state.theta[n] - subgradient[n];
        scaled[n] = state.eta * next.theta[n];
    }
    next.x = project_capped_box_simplex(scaled, capacity);
    return next;
}

}  // namespace edgecache
