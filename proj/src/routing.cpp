#include "edgecache/routing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace edgecache {

namespace {

constexpr int kMaxBisectionSteps = 200;

double water_tolerance(double target_d) { return 1e-10 * (1.0 + target_d); }

}  // namespace

double solve_water_level(const LatencyFunction& latency, double base_load, double rate,
                         double cap, double target_d) {
    const double lo_load = base_load;
    const double hi_load = base_load + rate * cap;
    if (!(rate > 0.0) || !(cap > 0.0) || !(latency.marginal(lo_load) < target_d) ||
        !(latency.marginal(hi_load) > target_d)) {
        std::ostringstream os;
        os << "water level " << target_d << " not bracketed by loads [" << lo_load << ", "
           << hi_load << "]";
        throw std::logic_error(os.str());
    }

    if (auto s = latency.load_at_marginal(target_d)) {
        return std::clamp((*s - base_load) / rate, 0.0, cap);
    }

    const double tol = water_tolerance(target_d);
    double lo = 0.0;
    double hi = cap;
    double mid = 0.5 * (lo + hi);
    for (int step = 0; step < kMaxBisectionSteps; ++step) {
        mid = 0.5 * (lo + hi);
        const double gap = latency.marginal(base_load + rate * mid) - target_d;
        if (std::abs(gap) <= tol) break;
        if (gap < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 0.0) break;
    }
    return mid;
}

RoutingOutcome service_routing(const ServiceCatalog& catalog, const SlotArrivals& arrivals,
                               const LatencyFunction& latency, std::span<const double> cache) {
    const std::size_t n_services = catalog.size();
    if (cache.size() != n_services || arrivals.rates.size() != n_services) {
        throw std::invalid_argument("service_routing: cache/arrival size does not match catalog");
    }

    RoutingOutcome out;
    out.routing.y.assign(n_services, 0.0);
    std::vector<double>& y = out.routing.y;

    // J is tracked through the running load only.
    double load = 0.0;
    for (std::size_t n : catalog.descending_order()) {
        const double d = catalog.forwarding_latency(n);
        const double rate = arrivals.rates[n];
        if (!(latency.marginal(load) < d)) continue;
        const double before = load;
        y[n] = cache[n];
        load = before + rate * cache[n];
        if (latency.marginal(load) > d) {
            y[n] = solve_water_level(latency, before, rate, cache[n], d);
            load = before + rate * y[n];
        }
    }

    const double level = latency.marginal(load);
    out.nu.assign(n_services, 0.0);
    out.mu.assign(n_services, 0.0);
    out.subgradient.assign(n_services, 0.0);
    for (std::size_t n = 0; n < n_services; ++n) {
        const double d = catalog.forwarding_latency(n);
        const double rate = arrivals.rates[n];
        if (level <= d) {
            out.nu[n] = rate * (d - level);
        } else {
            out.mu[n] = rate * (level - d);
        }
        out.subgradient[n] = -out.nu[n];
    }

    out.edge_load = load;
    out.water_level = level;
    out.objective = eval_latency_cost(catalog, arrivals, latency, y);
    return out;
}

bool verify_kkt(const RoutingOutcome& outcome, const ServiceCatalog& catalog,
                const SlotArrivals& arrivals, const LatencyFunction& latency,
                std::span<const double> cache, double tol) {
    const std::size_t n_services = catalog.size();
    const auto& y = outcome.routing.y;
    if (y.size() != n_services || outcome.nu.size() != n_services ||
        outcome.mu.size() != n_services || cache.size() != n_services) {
        return false;
    }
    const double load = edge_load(arrivals, y);
    if (!(load < latency.load_ceiling())) return false;
    const double level = latency.marginal(load);

    for (std::size_t n = 0; n < n_services; ++n) {
        const double d = catalog.forwarding_latency(n);
        const double rate = arrivals.rates[n];
        const double nu = outcome.nu[n];
        const double mu = outcome.mu[n];
        if (y[n] < -tol || y[n] > cache[n] + tol) return false;
        if (std::abs(rate * (level - d) - mu + nu) > tol) return false;
        if (std::abs(nu * (y[n] - cache[n])) > tol) return false;
        if (std::abs(mu * y[n]) > tol) return false;
        if (nu < -tol || mu < -tol) return false;
    }
    return true;
}

}  // namespace edgecache
