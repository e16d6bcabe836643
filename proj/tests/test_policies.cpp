#include <cmath>
#include <memory>

#include "doctest.h"
#include "edgecache/policies.hpp"
#include "edgecache/workload.hpp"

using namespace edgecache;

namespace {

Instance small_instance(double phi = 10.0, double beta = 5.0) {
    return Instance(ServiceCatalog({2.0, 3.0, 2.5, 3.5}, 2), std::make_shared<Mm1Latency>(phi), CostParams{beta});
}

SlotArrivals arrivals(std::vector<double> rates, int t = 1) { return SlotArrivals{std::move(rates), t}; }

std::vector<SlotArrivals> zipf_slots(std::size_t n, int horizon, std::uint64_t seed) {
    WorkloadSpec spec;
    spec.n_services = n;
    spec.horizon = horizon;
    spec.requests_per_slot = 20.0;
    spec.shuffle_period = 10;
    spec.seed = seed;
    return generate_trace(spec).slots;
}

}  // namespace

TEST_CASE("first OCR slot forwards everything and accumulates the marginal gain") {
    const Instance inst = small_instance();
    const SlotArrivals a = arrivals({1.0, 2.0, 0.0, 4.0});
    const auto [rec, next] = ocr_step(inst, FractionalState::initial(4, 0.05), a);
    CHECK(rec.latency_cost == doctest::Approx(1.0 * 2.0 + 2.0 * 3.0 + 4.0 * 3.5));
    CHECK(rec.install_cost == 0.0);
    const double c0 = 0.1;
    const std::vector<double> d{2.0, 3.0, 2.5, 3.5};
    for (std::size_t n = 0; n < 4; ++n) {
        CHECK(next.cacher.theta[n] == doctest::Approx(a.rates[n] * (d[n] - c0)));
        CHECK(rec.subgradient[n] == doctest::Approx(-a.rates[n] * (d[n] - c0)));
    }
}

TEST_CASE("zero step size never leaves the empty cache") {
    const Instance inst = small_instance();
    FractionalState state = FractionalState::initial(4, 0.0);
    for (int t = 1; t <= 5; ++t) {
        const SlotArrivals a = arrivals({1.0, 2.0, 3.0, 4.0}, t);
        auto [rec, next] = ocr_step(inst, state, a);
        CHECK(rec.latency_cost == doctest::Approx(2.0 + 6.0 + 7.5 + 14.0));
        CHECK(rec.install_cost == 0.0);
        state = next;
    }
}

TEST_CASE("OGA moves along lambda times d regardless of the server") {
    const SlotArrivals a = arrivals({1.0, 2.0, 0.0, 4.0});
    const auto [r1, fast] = oga_step(small_instance(10.0), FractionalState::initial(4, 0.05), a);
    const auto [r2, slow] = oga_step(small_instance(3.0), FractionalState::initial(4, 0.05), a);
    const std::vector<double> d{2.0, 3.0, 2.5, 3.5};
    for (std::size_t n = 0; n < 4; ++n) CHECK(fast.cacher.theta[n] == doctest::Approx(a.rates[n] * d[n]));
    CHECK(fast.cacher.theta == slow.cacher.theta);
    CHECK(fast.cacher.x.x == slow.cacher.x.x);
}

TEST_CASE("fractional install cost charges the positive cache change of each slot") {
    const Instance inst = small_instance();
    const auto slots = zipf_slots(4, 40, 3);
    FractionalState state = FractionalState::initial(4, 0.05);
    std::vector<double> prev(4, 0.0);
    for (const SlotArrivals& a : slots) {
        auto [rec, next] = ocr_step(inst, state, a);
        CHECK(rec.install_cost == doctest::Approx(5.0 * positive_part_distance(rec.cache, prev)));
        CHECK(verify_kkt(service_routing(inst, a, rec.cache), inst.catalog, a, *inst.latency, rec.cache, 1e-7));
        prev = rec.cache;
        state = next;
    }
}

TEST_CASE("ROCR with a fine grid tracks the fractional cache") {
    const Instance inst = small_instance();
    const SlotArrivals a = arrivals({3.0, 1.0, 2.0, 5.0});
    const RocrState s0 = RocrState::initial(4, 2, 0.05, 10000, 9);
    const auto [rec, s1] = rocr_step(inst, s0, a);
    for (std::size_t n = 0; n < 4; ++n) CHECK(std::abs(s1.quantized.value(n) - s1.cacher.x.x[n]) <= 1e-4);
}

TEST_CASE("ROCR expected install cost respects the tripled movement bound") {
    const Instance inst = small_instance(10.0, 7.0);
    const auto slots = zipf_slots(4, 60, 5);
    RocrState state = RocrState::initial(4, 2, 0.2, 8, 13);
    QuantizedCache before = state.quantized;
    for (std::size_t t = 0; t < slots.size(); ++t) {
        auto [rec, next] = rocr_step(inst, state, slots[t]);
        if (t > 0) {
            // this slot pays for the move made at the end of the previous slot
            CHECK(rec.expected_install_cost <= 3.0 * 7.0 * positive_unit_change(before, state.quantized) / 8.0 + 1e-12);
            CHECK(rec.install_cost <= rec.expected_install_cost * 8.0 + 1e-12);
        }
        before = state.quantized;
        for (double v : rec.cache) CHECK((v == 0.0 || v == 1.0));
        double held = 0.0;
        for (double v : rec.cache) held += v;
        CHECK(held <= 2.0);
        state = next;
    }
}

TEST_CASE("ROCR is deterministic per seed") {
    const Instance inst = small_instance();
    const auto slots = zipf_slots(4, 30, 2);
    auto stream = [&](std::uint64_t seed) {
        RocrState state = RocrState::initial(4, 2, 0.05, 20, seed);
        std::vector<double> out;
        for (const SlotArrivals& a : slots) {
            auto [rec, next] = rocr_step(inst, state, a);
            out.push_back(rec.latency_cost);
            out.push_back(rec.install_cost);
            out.insert(out.end(), rec.cache.begin(), rec.cache.end());
            state = next;
        }
        return out;
    };
    CHECK(stream(1) == stream(1));
}

TEST_CASE("active path occupancy is unbiased for the quantized marginals") {
    // With the gradient taken at xq the marginal trajectory does not depend
    // on the seed, so averaging the realized cache over seeds recovers xq.
    const Instance inst = small_instance();
    const auto slots = zipf_slots(4, 6, 1);
    const int runs = 2000;
    std::vector<double> mean(4, 0.0);
    std::vector<double> target;
    for (int seed = 0; seed < runs; ++seed) {
        RocrState state = RocrState::initial(4, 2, 0.05, 10, static_cast<std::uint64_t>(seed) + 100,
                                             GradientSource::QuantizedCache);
        for (std::size_t t = 0; t + 1 < slots.size(); ++t) state = rocr_step(inst, state, slots[t]).second;
        if (target.empty()) target = state.quantized.values();
        CHECK(state.quantized.values() == target);
        const auto rec = rocr_step(inst, state, slots.back()).first;
        for (std::size_t n = 0; n < 4; ++n) mean[n] += rec.cache[n] / runs;
    }
    for (std::size_t n = 0; n < 4; ++n) {
        const double sd = std::sqrt(target[n] * (1.0 - target[n]) / runs);
        CHECK(std::abs(mean[n] - target[n]) <= 4.0 * sd + 1e-12);
    }
}

TEST_CASE("offline policy caches the largest aggregate forwarding cost") {
    const ServiceCatalog catalog({1.0, 3.0, 2.0}, 1);
    const std::vector<SlotArrivals> trace{arrivals({4.0, 2.0, 3.0}, 1), arrivals({6.0, 3.0, 5.0}, 2)};
    const OfflineSolution sol = solve_offline_static(catalog, trace);
    CHECK(sol.scores == std::vector<double>{10.0, 15.0, 16.0});
    CHECK(sol.cache == std::vector<double>{0.0, 0.0, 1.0});

    const ServiceCatalog roomy({1.0, 3.0, 2.0}, 5);
    CHECK(solve_offline_static(roomy, trace).cache == std::vector<double>{1.0, 1.0, 1.0});

    const std::vector<SlotArrivals> sparse{arrivals({0.0, 1.0, 0.0}, 1)};
    CHECK(solve_offline_static(roomy, sparse).cache == std::vector<double>{0.0, 1.0, 0.0});
    CHECK_THROWS(solve_offline_static(catalog, std::vector<SlotArrivals>{}));
}

TEST_CASE("regret of the offline policy against itself is zero") {
    const Instance inst = small_instance();
    const auto slots = zipf_slots(4, 25, 4);
    const OfflineSolution sol = solve_offline_static(inst.catalog, slots);
    auto policy = make_policy(PolicyKind::Offline, inst, PolicyOptions{}, &sol);
    std::vector<PolicyStepRecord> records;
    std::vector<double> offline;
    for (const SlotArrivals& a : slots) {
        records.push_back(policy->step(a));
        CHECK(records.back().install_cost == 0.0);
        offline.push_back(records.back().latency_cost);
    }
    const RegretSeries reg = regret(records, offline);
    for (double r : reg.cumulative) CHECK(r == 0.0);
    offline.pop_back();
    CHECK_THROWS(regret(records, offline));
}

TEST_CASE("single-slot regret with the offline cache is the install cost") {
    const std::vector<SlotCost> costs{{12.0, 3.0, 3.0}};
    const std::vector<double> offline{12.0};
    const RegretSeries reg = regret(costs, offline);
    CHECK(reg.cumulative[0] == 3.0);
    CHECK(reg.per_slot[0] == 3.0);

    const std::vector<SlotCost> two{{12.0, 3.0, 3.0}, {10.0, 0.0, 0.0}};
    const std::vector<double> off2{12.0, 11.0};
    const RegretSeries r2 = regret(two, off2);
    CHECK(r2.cumulative[1] == 2.0);
    CHECK(r2.per_slot[1] == 1.0);
}

TEST_CASE("policy names round-trip") {
    for (PolicyKind kind : {PolicyKind::Ocr, PolicyKind::Rocr, PolicyKind::RocrQuantizedGradient, PolicyKind::Oga,
                            PolicyKind::Offline}) {
        CHECK(parse_policy(policy_name(kind)) == kind);
    }
    CHECK_FALSE(parse_policy("LRU").has_value());
    CHECK_THROWS(make_policy(PolicyKind::Offline, small_instance(), PolicyOptions{}));
}
