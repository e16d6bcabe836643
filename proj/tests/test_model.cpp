#include <cmath>
#include <random>

#include "doctest.h"
#include "edgecache/model.hpp"

using namespace edgecache;

namespace {

SlotArrivals arrivals(std::vector<double> rates) { return SlotArrivals{std::move(rates), 1}; }

}  // namespace

TEST_CASE("catalog validates its inputs and orders by descending d") {
    CHECK_THROWS_AS(ServiceCatalog({2.0, 0.0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(ServiceCatalog({2.0}, 0), std::invalid_argument);

    ServiceCatalog catalog({2.0, 3.0, 2.0, 4.0}, 2);
    const auto order = catalog.descending_order();
    REQUIRE(order.size() == 4);
    CHECK(order[0] == 3);
    CHECK(order[1] == 1);
    CHECK(order[2] == 0);  // tie between 0 and 2 keeps ascending index
    CHECK(order[3] == 2);
    CHECK(catalog.max_forwarding_latency() == 4.0);
    CHECK(catalog.min_forwarding_latency() == 2.0);
}

TEST_CASE("latency cost with nothing at the edge is pure forwarding") {
    ServiceCatalog catalog({2.0, 1.0}, 2);
    Mm1Latency mm1(10.0);
    const std::vector<double> y{0.0, 0.0};
    CHECK(eval_latency_cost(catalog, arrivals({3.0, 4.0}), mm1, y) == 10.0);
}

TEST_CASE("latency cost at the water level") {
    ServiceCatalog catalog({2.0, 1.0}, 2);
    Mm1Latency mm1(10.0);
    const double s = 10.0 - std::sqrt(10.0);
    const std::vector<double> y{1.0, (s - 3.0) / 4.0};
    const double expected = s / (10.0 - s) + (4.0 - (s - 3.0)) * 1.0;
    CHECK(eval_latency_cost(catalog, arrivals({3.0, 4.0}), mm1, y) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(2.32456).epsilon(1e-5));
}

TEST_CASE("load at or beyond the ceiling is a domain error naming the load") {
    ServiceCatalog catalog({2.0}, 1);
    Mm1Latency mm1(10.0);
    const std::vector<double> y{1.0};
    CHECK_THROWS_AS(eval_latency_cost(catalog, arrivals({20.0}), mm1, y), std::domain_error);
    try {
        eval_marginal(catalog, arrivals({20.0}), mm1, y);
        FAIL("expected a domain error");
    } catch (const LoadCeilingError& e) {
        CHECK(e.load() == 20.0);
        CHECK(e.ceiling() == 10.0);
    }
}

TEST_CASE("marginal latency of the M/M/1 model") {
    Mm1Latency mm1(10.0);
    CHECK(mm1.marginal(0.0) == doctest::Approx(0.1));
    CHECK(mm1.marginal(3.0) == doctest::Approx(10.0 / 49.0).epsilon(1e-12));
    CHECK(std::isinf(mm1.marginal(10.0)));

    // closed form against the generic c + s c'
    for (int i = 0; i < 1000; ++i) {
        const double s = 9.99 * i / 1000.0;
        const double generic = mm1.cost(s) + s * mm1.derivative(s);
        CHECK(mm1.marginal(s) == doctest::Approx(generic).epsilon(1e-12));
    }
}

TEST_CASE("marginal latency is strictly increasing on a grid") {
    Mm1Latency mm1(25.0);
    PolynomialLatency poly(0.5, 0.01, 2.0);
    for (const LatencyFunction* f : {static_cast<const LatencyFunction*>(&mm1),
                                     static_cast<const LatencyFunction*>(&poly)}) {
        const double top = std::isfinite(f->load_ceiling()) ? f->load_ceiling() : 100.0;
        double prev = f->marginal(0.0);
        for (int i = 1; i < 1000; ++i) {
            const double j = f->marginal(top * i / 1000.0);
            CHECK(j > prev);
            prev = j;
        }
    }
    CHECK(mm1.load_at_marginal(2.0).value() == doctest::Approx(25.0 - std::sqrt(12.5)));
    CHECK_FALSE(poly.load_at_marginal(2.0).has_value());
}

TEST_CASE("partial derivative of the latency cost matches finite differences") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + trial % 5;
        std::vector<double> d(n), rates(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = 2.0 + 2.0 * unit(rng);
            rates[i] = 1.0 + 9.0 * unit(rng);
            y[i] = 0.05 + 0.9 * unit(rng);
        }
        ServiceCatalog catalog(d, static_cast<int>(n));
        Mm1Latency mm1(20.0 + 80.0 * unit(rng) + edge_load(arrivals(rates), y));
        const SlotArrivals a = arrivals(rates);
        const std::size_t k = trial % n;
        const double analytic = rates[k] * (eval_marginal(catalog, a, mm1, y) - d[k]);
        const double h = 1e-6;
        auto up = y, down = y;
        up[k] += h;
        down[k] -= h;
        const double numeric =
            (eval_latency_cost(catalog, a, mm1, up) - eval_latency_cost(catalog, a, mm1, down)) / (2 * h);
        CHECK(numeric == doctest::Approx(analytic).epsilon(1e-6).scale(1.0));
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("instance requires c(0) between 0 and the smallest forwarding latency") {
    ServiceCatalog catalog({2.0, 3.0}, 1);
    CHECK_NOTHROW(Instance(catalog, std::make_shared<Mm1Latency>(60.0), CostParams{100.0}));
    CHECK_THROWS(Instance(catalog, std::make_shared<Mm1Latency>(0.25), CostParams{100.0}));
    CHECK_THROWS(Instance(catalog, std::make_shared<PolynomialLatency>(2.5, 1.0, 1.0), CostParams{}));
}

TEST_CASE("cache and arrival validation") {
    ServiceCatalog catalog({2.0, 3.0, 4.0}, 2);
    CHECK_NOTHROW(validate_cache(CacheVector{{1.0, 0.5, 0.5}}, catalog));
    CHECK_THROWS(validate_cache(CacheVector{{1.0, 0.6, 0.5}}, catalog));
    CHECK_THROWS(validate_cache(CacheVector{{1.2, 0.0, 0.0}}, catalog));
    CHECK_THROWS(validate_cache(CacheVector{{1.0, 0.0}}, catalog));

    CHECK_NOTHROW(validate_arrivals(arrivals({1.0, 2.0, 0.0}), 3, 3.0));
    CHECK_THROWS(validate_arrivals(arrivals({1.0, 2.0, 0.5}), 3, 3.0));
    CHECK_THROWS(validate_arrivals(arrivals({1.0, -2.0, 0.0}), 3));
}

TEST_CASE("positive part distance") {
    const std::vector<double> a{0.5, 0.2, 1.0}, b{0.1, 0.6, 1.0};
    CHECK(positive_part_distance(a, b) == doctest::Approx(0.4));
    CHECK(positive_part_distance(b, a) == doctest::Approx(0.4));
    CHECK(positive_part_distance(a, a) == 0.0);
}
