#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {

namespace {

double objective(const edgecache::ServiceCatalog& catalog, const edgecache::SlotArrivals& arrivals,
                 const edgecache::LatencyFunction& latency, std::span<const double> y) {
    double load = 0.0;
    double forwarded = 0.0;
    for (std::size_t n = 0; n < y.size(); ++n) {
        load += arrivals.rates[n] * y[n];
        forwarded += arrivals.rates[n] * (1.0 - y[n]) * catalog.forwarding_latency(n);
    }
    if (load >= latency.load_ceiling()) return std::numeric_limits<double>::infinity();
    return load * latency.cost(load) + forwarded;
}

}  // namespace

RoutingSolution pgd_routing(const edgecache::ServiceCatalog& catalog,
                            const edgecache::SlotArrivals& arrivals,
                            const edgecache::LatencyFunction& latency,
                            std::span<const double> cache, int max_iterations) {
    const std::size_t n = cache.size();
    RoutingSolution sol;
    sol.y.assign(n, 0.0);
    double f = objective(catalog, arrivals, latency, sol.y);
    double step = 1e-2;
    std::vector<double> grad(n), trial(n);

    for (int it = 0; it < max_iterations; ++it) {
        sol.iterations = it + 1;
        double load = 0.0;
        for (std::size_t i = 0; i < n; ++i) load += arrivals.rates[i] * sol.y[i];
        const double marginal = latency.cost(load) + load * latency.derivative(load);
        for (std::size_t i = 0; i < n; ++i) {
            grad[i] = arrivals.rates[i] * (marginal - catalog.forwarding_latency(i));
        }

        step *= 2.0;
        bool moved = false;
        for (int bt = 0; bt < 200; ++bt) {
            double lin = 0.0;
            double sq = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = std::clamp(sol.y[i] - step * grad[i], 0.0, cache[i]);
                const double dy = trial[i] - sol.y[i];
                lin += grad[i] * dy;
                sq += dy * dy;
            }
            if (sq == 0.0) break;
            const double ft = objective(catalog, arrivals, latency, trial);
            if (ft <= f + lin + sq / (2.0 * step)) {
                moved = ft < f;
                sol.y = trial;
                f = std::min(f, ft);
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    sol.objective = f;
    return sol;
}

std::vector<double> dykstra_projection(std::span<const double> v, int capacity, int max_iterations) {
    const std::size_t n = v.size();
    std::vector<double> x(v.begin(), v.end());
    std::vector<double> p(n, 0.0), q(n, 0.0), y(n), prev(n);
    for (int it = 0; it < max_iterations; ++it) {
        prev = x;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = std::clamp(x[i] + p[i], 0.0, 1.0);
            p[i] = x[i] + p[i] - y[i];
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += y[i] + q[i];
        const double shift = sum > capacity ? (sum - capacity) / static_cast<double>(n) : 0.0;
        // x can stall for a sweep while the corrections still move, so also
        // require the box and halfspace iterates to meet.
        double change = 0.0;
        double gap = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double next = y[i] + q[i] - shift;
            q[i] = y[i] + q[i] - next;
            x[i] = next;
            change = std::max(change, std::abs(x[i] - prev[i]));
            gap = std::max(gap, std::abs(x[i] - y[i]));
        }
        if (change < 1e-15 && gap < 1e-13) break;
    }
    return x;
}

namespace {

void enumerate(std::span<const double> scaled, int granularity, std::size_t i, int remaining, double acc,
               double& best) {
    if (acc >= best) return;
    if (i == scaled.size()) {
        if (remaining == 0) best = acc;
        return;
    }
    const int hi = std::min(remaining, granularity);
    for (int u = 0; u <= hi; ++u) {
        enumerate(scaled, granularity, i + 1, remaining - u, acc + std::abs(u - scaled[i]), best);
    }
}

}  // namespace

double min_l1_grid_distance(std::span<const double> x, int granularity, int total_units) {
    std::vector<double> scaled(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) scaled[i] = x[i] * granularity;
    double best = std::numeric_limits<double>::infinity();
    enumerate(scaled, granularity, 0, total_units, 0.0, best);
    return best / granularity;
}

}  // namespace oracle
