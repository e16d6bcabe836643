#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "edgecache/model.hpp"
#include "edgecache/rounding.hpp"

namespace edgecache {

/// Random routing problem: MM1 phi in [20,100], d in [2,4], total arrivals
/// at most W, cache feasible for capacity Z.
struct RoutingProblem {
    ServiceCatalog catalog;
    double phi;
    SlotArrivals arrivals;
    double arrival_bound;
    std::vector<double> cache;
};

RoutingProblem random_routing_problem(Rng& rng, std::size_t max_services = 10);

struct SuiteResult {
    std::string name;
    int checks = 0;
    int failures = 0;
    std::string detail;

    bool passed() const noexcept { return checks > 0 && failures == 0; }
};

struct ValidationReport {
    std::vector<SuiteResult> suites;

    bool passed() const noexcept;
    void print(std::ostream& out) const;
};

SuiteResult check_routing_kkt(Rng& rng, int instances);
SuiteResult check_gradient_bound(Rng& rng, int instances);
SuiteResult check_subgradient_fd(Rng& rng, int coordinates);
SuiteResult check_routing_convexity(Rng& rng, int instances);
SuiteResult check_projection(Rng& rng, int instances);
SuiteResult check_quantizer(Rng& rng, int instances);
SuiteResult check_sample_paths(Rng& rng, int transitions);

/// Runs every suite with the given seed; `scale` multiplies instance counts.
ValidationReport run_validation(std::uint64_t seed, int scale = 1);

}  // namespace edgecache
