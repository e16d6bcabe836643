#pragma once

#include <vector>

#include "edgecache/model.hpp"

namespace edgecache {

/// Optimal per-slot routing for a fixed cache, together with the Lagrange
/// multipliers of y <= x (nu) and y >= 0 (mu). All vectors are indexed by
/// the original service id.
struct RoutingOutcome {
    RoutingVector routing;
    std::vector<double> nu;
    std::vector<double> mu;
    double objective = 0.0;           // G_t(X_t)
    std::vector<double> subgradient;  // -nu
    double edge_load = 0.0;
    double water_level = 0.0;         // J_t at the optimum
};

/// Greedy water-filling over services in descending-d order. Each cached
/// service is admitted fully while the marginal latency stays below its d_n;
/// the first service that would push the marginal past d_n is admitted
/// partially so that J == d_n. Runs in O(N) latency evaluations.
RoutingOutcome service_routing(const ServiceCatalog& catalog, const SlotArrivals& arrivals,
                               const LatencyFunction& latency, std::span<const double> cache);

inline RoutingOutcome service_routing(const Instance& instance, const SlotArrivals& arrivals,
                                      std::span<const double> cache) {
    return service_routing(instance.catalog, arrivals, *instance.latency, cache);
}

/// Returns y in [0, cap] with J(base_load + rate * y) == target_d. Requires
/// J(base_load) < target_d < J(base_load + rate * cap); throws
/// std::logic_error otherwise.
double solve_water_level(const LatencyFunction& latency, double base_load, double rate,
                         double cap, double target_d);

/// Checks stationarity, complementary slackness, dual and primal feasibility
/// of the routing problem's KKT system within tol.
bool verify_kkt(const RoutingOutcome& outcome, const ServiceCatalog& catalog,
                const SlotArrivals& arrivals, const LatencyFunction& latency,
                std::span<const double> cache, double tol);

}  // namespace edgecache
