#include "edgecache/validation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "edgecache/caching.hpp"
#include "edgecache/routing.hpp"

namespace edgecache {

namespace {

double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::vector<double> random_feasible_cache(Rng& rng, std::size_t n, int capacity) {
    std::vector<double> v(n);
    for (double& vn : v) {
        const double u = uniform(rng, 0.0, 1.0);
        vn = u < 0.15 ? 0.0 : (u < 0.3 ? 1.0 : uniform(rng, -0.3, 1.3));
    }
    return project_capped_box_simplex(v, capacity).x;
}

void note_failure(SuiteResult& suite, const std::string& what) {
    if (++suite.failures <= 3) suite.detail += (suite.detail.empty() ? "" : "; ") + what;
}

}  // namespace

RoutingProblem random_routing_problem(Rng& rng, std::size_t max_services) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<int>(max_services)));
    std::vector<double> d(n);
    for (double& dn : d) dn = uniform(rng, 2.0, 4.0);
    const int capacity = uniform_int(rng, 1, static_cast<int>(n));
    const double phi = uniform(rng, 20.0, 100.0);
    const double bound = uniform(rng, 0.2, 2.0) * phi;

    std::vector<double> weights(n);
    double weight_sum = 0.0;
    for (double& w : weights) {
        w = uniform(rng, 0.0, 1.0) < 0.1 ? 0.0 : -std::log(uniform(rng, 1e-12, 1.0));
        weight_sum += w;
    }
    SlotArrivals arrivals;
    arrivals.slot = 1;
    arrivals.rates.resize(n);
    const double total = bound * uniform(rng, 0.5, 1.0);
    for (std::size_t i = 0; i < n; ++i) arrivals.rates[i] = weight_sum > 0 ? total * weights[i] / weight_sum : 0.0;

    return RoutingProblem{ServiceCatalog(std::move(d), capacity), phi, std::move(arrivals), bound,
                          random_feasible_cache(rng, n, capacity)};
}

bool ValidationReport::passed() const noexcept {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed(); });
}

void ValidationReport::print(std::ostream& out) const {
    for (const SuiteResult& s : suites) {
        out << (s.passed() ? "PASS " : "FAIL ") << s.name << "  checks=" << s.checks
            << " failures=" << s.failures;
        if (!s.detail.empty()) out << "  [" << s.detail << "]";
        out << '\n';
    }
    out << (passed() ? "all invariant suites passed" : "invariant violations found") << '\n';
}

SuiteResult check_routing_kkt(Rng& rng, int instances) {
    SuiteResult suite;
    suite.name = "routing-kkt";
    for (int i = 0; i < instances; ++i) {
        const RoutingProblem p = random_routing_problem(rng);
        const Mm1Latency latency(p.phi);
        const RoutingOutcome out = service_routing(p.catalog, p.arrivals, latency, p.cache);
        ++suite.checks;
        const double tol = 1e-8 * (1.0 + p.catalog.max_forwarding_latency());
        if (!verify_kkt(out, p.catalog, p.arrivals, latency, p.cache, tol)) {
            note_failure(suite, "instance " + std::to_string(i) + " violates KKT");
        }
        for (std::size_t n = 0; n < out.subgradient.size(); ++n) {
            if (out.subgradient[n] > 0.0 || out.subgradient[n] != -out.nu[n]) {
                note_failure(suite, "instance " + std::to_string(i) + " subgradient sign");
                break;
            }
        }
    }
    return suite;
}

SuiteResult check_gradient_bound(Rng& rng, int instances) {
    SuiteResult suite;
    suite.name = "gradient-bound";
    for (int i = 0; i < instances; ++i) {
        const RoutingProblem p = random_routing_problem(rng);
        const Mm1Latency latency(p.phi);
        const RoutingOutcome out = service_routing(p.catalog, p.arrivals, latency, p.cache);
        double norm2 = 0.0;
        for (double g : out.subgradient) norm2 += g * g;
        const double dmax = p.catalog.max_forwarding_latency();
        ++suite.checks;
        if (norm2 > p.arrival_bound * p.arrival_bound * dmax * dmax) {
            note_failure(suite, "instance " + std::to_string(i) + " exceeds W^2 max d^2");
        }
    }
    return suite;
}

SuiteResult check_subgradient_fd(Rng& rng, int coordinates) {
    SuiteResult suite;
    suite.name = "subgradient-finite-difference";
    const double h = 1e-6;
    int sampled = 0;
    int agree = 0;
    int attempts = 0;
    while (sampled < coordinates && attempts < 100 * coordinates) {
        ++attempts;
        RoutingProblem p = random_routing_problem(rng);
        for (double& x : p.cache) x = uniform(rng, 0.1, 0.9);
        const Mm1Latency latency(p.phi);
        const RoutingOutcome base = service_routing(p.catalog, p.arrivals, latency, p.cache);
        bool kinky = false;
        for (std::size_t n = 0; n < p.cache.size(); ++n) {
            if (std::abs(base.water_level - p.catalog.forwarding_latency(n)) <= 1e-3) kinky = true;
        }
        if (kinky) continue;
        const auto n = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(p.cache.size()) - 1));
        std::vector<double> up = p.cache;
        std::vector<double> down = p.cache;
        up[n] += h;
        down[n] -= h;
        const double g_up = service_routing(p.catalog, p.arrivals, latency, up).objective;
        const double g_down = service_routing(p.catalog, p.arrivals, latency, down).objective;
        const double fd = (g_up - g_down) / (2.0 * h);
        const double g = base.subgradient[n];
        ++sampled;
        if (std::abs(fd - g) <= 1e-4 * std::max(1.0, std::abs(g))) ++agree;
    }
    suite.checks = sampled;
    const int needed = static_cast<int>(std::ceil(0.95 * sampled));
    if (sampled < coordinates || agree < needed) {
        suite.failures = std::max(1, needed - agree);
    }
    std::ostringstream os;
    os << agree << "/" << sampled << " coordinates agree";
    suite.detail = os.str();
    return suite;
}

SuiteResult check_routing_convexity(Rng& rng, int instances) {
    SuiteResult suite;
    suite.name = "routing-convexity";
    for (int i = 0; i < instances; ++i) {
        const RoutingProblem p = random_routing_problem(rng);
        const Mm1Latency latency(p.phi);
        const std::vector<double> other = random_feasible_cache(rng, p.cache.size(), p.catalog.capacity());
        std::vector<double> mid(p.cache.size());
        for (std::size_t n = 0; n < mid.size(); ++n) mid[n] = 0.5 * (p.cache[n] + other[n]);
        const double g1 = service_routing(p.catalog, p.arrivals, latency, p.cache).objective;
        const double g2 = service_routing(p.catalog, p.arrivals, latency, other).objective;
        const double gm = service_routing(p.catalog, p.arrivals, latency, mid).objective;
        ++suite.checks;
        if (gm > 0.5 * (g1 + g2) + 1e-9 * (1.0 + std::abs(g1) + std::abs(g2))) {
            note_failure(suite, "instance " + std::to_string(i) + " midpoint above chord");
        }
        // Raising one cache entry never lowers the edge load.
        std::vector<double> raised = p.cache;
        const auto n = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(raised.size()) - 1));
        raised[n] = std::min(1.0, raised[n] + 0.25);
        const double load = service_routing(p.catalog, p.arrivals, latency, p.cache).edge_load;
        const double raised_load = service_routing(p.catalog, p.arrivals, latency, raised).edge_load;
        ++suite.checks;
        if (raised_load < load - 1e-9 * (1.0 + load)) {
            note_failure(suite, "instance " + std::to_string(i) + " edge load decreased");
        }
    }
    return suite;
}

SuiteResult check_projection(Rng& rng, int instances) {
    SuiteResult suite;
    suite.name = "capped-simplex-projection";
    for (int i = 0; i < instances; ++i) {
        const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 20));
        const int capacity = uniform_int(rng, 1, static_cast<int>(n) + 2);
        const double spread = uniform(rng, 0.5, 5.0);
        std::vector<double> v(n);
        std::vector<double> u(n);
        for (std::size_t k = 0; k < n; ++k) {
            v[k] = uniform(rng, -spread, spread);
            u[k] = uniform(rng, -spread, spread);
        }
        const CacheVector p = project_capped_box_simplex(v, capacity);
        const CacheVector q = project_capped_box_simplex(u, capacity);

        ++suite.checks;
        bool feasible = p.total() <= capacity + 1e-9;
        for (double x : p.x) feasible = feasible && x >= -1e-9 && x <= 1.0 + 1e-9;
        if (!feasible) note_failure(suite, "instance " + std::to_string(i) + " infeasible");

        ++suite.checks;
        double worst = -1.0;
        for (int trial = 0; trial < 100; ++trial) {
            const std::vector<double> x = random_feasible_cache(rng, n, capacity);
            double inner = 0.0;
            for (std::size_t k = 0; k < n; ++k) inner += (v[k] - p.x[k]) * (x[k] - p.x[k]);
            worst = std::max(worst, inner);
        }
        if (worst > 1e-8) note_failure(suite, "instance " + std::to_string(i) + " variational inequality");

        ++suite.checks;
        double dp = 0.0;
        double dv = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            dp += (p.x[k] - q.x[k]) * (p.x[k] - q.x[k]);
            dv += (v[k] - u[k]) * (v[k] - u[k]);
        }
        if (std::sqrt(dp) > std::sqrt(dv) + 1e-9) note_failure(suite, "instance " + std::to_string(i) + " expansive");

        ++suite.checks;
        const CacheVector pp = project_capped_box_simplex(p.x, capacity);
        for (std::size_t k = 0; k < n; ++k) {
            if (std::abs(pp.x[k] - p.x[k]) > 1e-9) {
                note_failure(suite, "instance " + std::to_string(i) + " not idempotent");
                break;
            }
        }
    }
    return suite;
}

SuiteResult check_quantizer(Rng& rng, int instances) {
    SuiteResult suite;
    suite.name = "quantizer";
    for (int i = 0; i < instances; ++i) {
        const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 50));
        const int capacity = uniform_int(rng, 1, 10);
        const int k = uniform_int(rng, 0, 1) == 0 ? 4 : 100;
        const CacheVector x{random_feasible_cache(rng, n, capacity)};
        const QuantizedCache q = quantize(x, k, capacity);
        ++suite.checks;
        bool ok = q.total_units() <= k * capacity;
        for (std::size_t j = 0; j < n; ++j) {
            ok = ok && q.units[j] >= 0 && q.units[j] <= k && std::abs(q.value(j) - x.x[j]) <= 1.0 / k + 1e-12;
        }
        if (!ok) note_failure(suite, "instance " + std::to_string(i));
    }
    return suite;
}

SuiteResult check_sample_paths(Rng& rng, int transitions) {
    SuiteResult suite;
    suite.name = "sample-paths";
    int done = 0;
    while (done < transitions) {
        const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 50));
        const int capacity = uniform_int(rng, 1, 10);
        const int k = uniform_int(rng, 0, 1) == 0 ? 4 : 100;
        SamplePathSet paths = SamplePathSet::empty(n, k, capacity, rng);
        QuantizedCache xq = QuantizedCache::zeros(n, k);
        for (int step = 0; step < 20 && done < transitions; ++step, ++done) {
            const QuantizedCache next = quantize(CacheVector{random_feasible_cache(rng, n, capacity)}, k, capacity);
            const AdvanceResult adv = rocr_advance(paths, xq, next, rng);
            ++suite.checks;
            bool ok = true;
            for (std::size_t s = 0; s < n; ++s) ok = ok && adv.paths.service_count(s) == next.units[s];
            for (int p = 0; p < k; ++p) ok = ok && adv.paths.path_load(static_cast<std::size_t>(p)) <= capacity;
            const int bound = 3 * positive_unit_change(xq, next);
            ok = ok && total_install_count(paths, adv.paths) <= bound;
            ok = ok && adv.stats.rebalance_swaps <= k * capacity;
            if (!ok) note_failure(suite, "transition " + std::to_string(done));
            paths = adv.paths;
            xq = next;
        }
    }
    return suite;
}

ValidationReport run_validation(std::uint64_t seed, int scale) {
    Rng rng(seed);
    scale = std::max(scale, 1);
    ValidationReport report;
    report.suites.push_back(check_routing_kkt(rng, 100 * scale));
    report.suites.push_back(check_gradient_bound(rng, 100 * scale));
    report.suites.push_back(check_subgradient_fd(rng, 200 * scale));
    report.suites.push_back(check_routing_convexity(rng, 100 * scale));
    report.suites.push_back(check_projection(rng, 200 * scale));
    report.suites.push_back(check_quantizer(rng, 200 * scale));
    report.suites.push_back(check_sample_paths(rng, 2000 * scale));
    return report;
}

}  // namespace edgecache
