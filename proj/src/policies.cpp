#include "edgecache/policies.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace edgecache {

FractionalState FractionalState::initial(std::size_t n_services, double eta) {
    return FractionalState{CacherState::initial(n_services, eta), std::vector<double>(n_services, 0.0)};
}

namespace {

std::pair<PolicyStepRecord, FractionalState> fractional_step(const Instance& instance,
                                                             const FractionalState& state,
                                                             const SlotArrivals& arrivals,
                                                             bool latency_aware) {
    const auto& cache = state.cacher.x.x;
    RoutingOutcome outcome = service_routing(instance, arrivals, cache);

    PolicyStepRecord record;
    record.slot = arrivals.slot;
    record.latency_cost = outcome.objective;
    record.install_cost = instance.costs.install_cost * positive_part_distance(cache, state.previous_cache);
    record.expected_install_cost = record.install_cost;
    record.cache = cache;
    record.routing = std::move(outcome.routing);

    if (latency_aware) {
        record.subgradient = std::move(outcome.subgradient);
    } else {
        record.subgradient.resize(cache.size());
        for (std::size_t n = 0; n < cache.size(); ++n) {
            record.subgradient[n] = -arrivals.rates[n] * instance.catalog.forwarding_latency(n);
        }
    }

    FractionalState next{caching_update(state.cacher, record.subgradient, instance.catalog.capacity()),
                         cache};
    return {std::move(record), std::move(next)};
}

}  // namespace

std::pair<PolicyStepRecord, FractionalState> ocr_step(const Instance& instance,
                                                      const FractionalState& state,
                                                      const SlotArrivals& arrivals) {
    return fractional_step(instance, state, arrivals, true);
}

std::pair<PolicyStepRecord, FractionalState> oga_step(const Instance& instance,
                                                      const FractionalState& state,
                                                      const SlotArrivals& arrivals) {
    return fractional_step(instance, state, arrivals, false);
}

RocrState RocrState::initial(std::size_t n_services, int capacity, double eta, int granularity,
                             std::uint64_t seed, GradientSource source) {
    Rng rng(seed);
    SamplePathSet paths = SamplePathSet::empty(n_services, granularity, capacity, rng);
    return RocrState{CacherState::initial(n_services, eta),
                     QuantizedCache::zeros(n_services, granularity),
                     std::move(paths),
                     rng,
                     source,
                     0,
                     0};
}

std::pair<PolicyStepRecord, RocrState> rocr_step(const Instance& instance, const RocrState& state,
                                                 const SlotArrivals& arrivals) {
    const double beta = instance.costs.install_cost;
    const std::size_t active = state.paths.active_path();
    std::vector<double> realized = state.paths.path_vector(active);
    RoutingOutcome outcome = service_routing(instance, arrivals, realized);

    PolicyStepRecord record;
    record.slot = arrivals.slot;
    record.latency_cost = outcome.objective;
    record.install_cost = beta * state.pending_active_installs;
    record.expected_install_cost =
        beta * static_cast<double>(state.pending_total_installs) / state.paths.n_paths();
    record.routing = std::move(outcome.routing);
    if (state.gradient_source == GradientSource::ActivePath) {
        record.subgradient = std::move(outcome.subgradient);
    } else {
        record.subgradient = service_routing(instance, arrivals, state.quantized.values()).subgradient;
    }
    record.cache = std::move(realized);

    const int capacity = instance.catalog.capacity();
    RocrState next{caching_update(state.cacher, record.subgradient, capacity),
                   QuantizedCache{},
                   state.paths,
                   state.rng,
                   state.gradient_source,
                   0,
                   0};
    next.quantized = quantize(next.cacher.x, state.paths.n_paths(), capacity);
    AdvanceResult advanced = rocr_advance(state.paths, state.quantized, next.quantized, next.rng);
    next.pending_active_installs = realized_install_count(state.paths, advanced.paths, active);
    next.pending_total_installs = total_install_count(state.paths, advanced.paths);
    next.paths = std::move(advanced.paths);
    return {std::move(record), std::move(next)};
}

OfflineSolution solve_offline_static(const ServiceCatalog& catalog,
                                     std::span<const SlotArrivals> trace) {
    if (trace.empty()) throw std::invalid_argument("offline policy needs a non-empty trace");
    const std::size_t n_services = catalog.size();
    OfflineSolution solution;
    solution.scores.assign(n_services, 0.0);
    for (const SlotArrivals& slot : trace) {
        if (slot.rates.size() != n_services) throw std::invalid_argument("trace slot size mismatch");
        for (std::size_t n = 0; n < n_services; ++n) solution.scores[n] += slot.rates[n];
    }
    for (std::size_t n = 0; n < n_services; ++n) solution.scores[n] *= catalog.forwarding_latency(n);

    std::vector<std::size_t> order(n_services);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return solution.scores[a] > solution.scores[b];
    });
    solution.cache.assign(n_services, 0.0);
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(catalog.capacity()), n_services);
    for (std::size_t i = 0; i < take && solution.scores[order[i]] > 0.0; ++i) {
        solution.cache[order[i]] = 1.0;
    }
    return solution;
}

PolicyStepRecord offline_step(const Instance& instance, const OfflineSolution& solution,
                              const SlotArrivals& arrivals) {
    RoutingOutcome outcome = service_routing(instance, arrivals, solution.cache);
    PolicyStepRecord record;
    record.slot = arrivals.slot;
    record.latency_cost = outcome.objective;
    record.cache = solution.cache;
    record.routing = std::move(outcome.routing);
    record.subgradient = std::move(outcome.subgradient);
    return record;
}

RegretSeries regret(std::span<const SlotCost> costs, std::span<const double> offline_latency) {
    if (costs.size() != offline_latency.size()) {
        throw std::invalid_argument("regret: policy horizon " + std::to_string(costs.size()) +
                                    " differs from offline horizon " +
                                    std::to_string(offline_latency.size()));
    }
    RegretSeries series;
    series.cumulative.resize(costs.size());
    series.per_slot.resize(costs.size());
    double total = 0.0;
    for (std::size_t t = 0; t < costs.size(); ++t) {
        total += costs[t].latency - offline_latency[t] + costs[t].install;
        series.cumulative[t] = total;
        series.per_slot[t] = total / static_cast<double>(t + 1);
    }
    return series;
}

RegretSeries regret(std::span<const PolicyStepRecord> records, std::span<const double> offline_latency) {
    std::vector<SlotCost> costs;
    costs.reserve(records.size());
    for (const PolicyStepRecord& r : records) {
        costs.push_back({r.latency_cost, r.install_cost, r.expected_install_cost});
    }
    return regret(costs, offline_latency);
}

std::string policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Ocr: return "OCR";
        case PolicyKind::Rocr: return "ROCR";
        case PolicyKind::RocrQuantizedGradient: return "ROCR-XQ";
        case PolicyKind::Oga: return "OGA";
        case PolicyKind::Offline: return "OFF";
    }
    return "?";
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
    for (PolicyKind kind : {PolicyKind::Ocr, PolicyKind::Rocr, PolicyKind::RocrQuantizedGradient,
                            PolicyKind::Oga, PolicyKind::Offline}) {
        if (policy_name(kind) == name) return kind;
    }
    return std::nullopt;
}

namespace {

class FractionalPolicy final : public Policy {
public:
    FractionalPolicy(PolicyKind kind, Instance instance, double eta)
        : kind_(kind), instance_(std::move(instance)),
          state_(FractionalState::initial(instance_.catalog.size(), eta)) {}

    PolicyKind kind() const noexcept override { return kind_; }

    PolicyStepRecord step(const SlotArrivals& arrivals) override {
        auto [record, next] = kind_ == PolicyKind::Ocr ? ocr_step(instance_, state_, arrivals)
                                                       : oga_step(instance_, state_, arrivals);
        state_ = std::move(next);
        return std::move(record);
    }

private:
    PolicyKind kind_;
    Instance instance_;
    FractionalState state_;
};

class RandomizedPolicy final : public Policy {
public:
    RandomizedPolicy(PolicyKind kind, Instance instance, const PolicyOptions& options)
        : kind_(kind), instance_(std::move(instance)),
          state_(RocrState::initial(instance_.catalog.size(), instance_.catalog.capacity(),
                                    options.eta, options.granularity, options.seed,
                                    kind == PolicyKind::Rocr ? GradientSource::ActivePath
                                                             : GradientSource::QuantizedCache)) {}

    PolicyKind kind() const noexcept override { return kind_; }

    PolicyStepRecord step(const SlotArrivals& arrivals) override {
        auto [record, next] = rocr_step(instance_, state_, arrivals);
        state_ = std::move(next);
        return std::move(record);
    }

private:
    PolicyKind kind_;
    Instance instance_;
    RocrState state_;
};

class OfflinePolicy final : public Policy {
public:
    OfflinePolicy(Instance instance, OfflineSolution solution)
        : instance_(std::move(instance)), solution_(std::move(solution)) {}

    PolicyKind kind() const noexcept override { return PolicyKind::Offline; }

    PolicyStepRecord step(const SlotArrivals& arrivals) override {
        return offline_step(instance_, solution_, arrivals);
    }

private:
    Instance instance_;
    OfflineSolution solution_;
};

}  // namespace

std::unique_ptr<Policy> make_policy(PolicyKind kind, const Instance& instance,
                                    const PolicyOptions& options, const OfflineSolution* offline) {
    switch (kind) {
        case PolicyKind::Ocr:
        case PolicyKind::Oga:
            return std::make_unique<FractionalPolicy>(kind, instance, options.eta);
        case PolicyKind::Rocr:
        case PolicyKind::RocrQuantizedGradient:
            return std::make_unique<RandomizedPolicy>(kind, instance, options);
        case PolicyKind::Offline:
            if (offline == nullptr) throw std::invalid_argument("offline policy needs its solution");
            return std::make_unique<OfflinePolicy>(instance, *offline);
    }
    throw std::invalid_argument("unknown policy kind");
}

}  // namespace edgecache
