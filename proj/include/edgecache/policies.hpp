#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "edgecache/caching.hpp"
#include "edgecache/model.hpp"
#include "edgecache/rounding.hpp"
#include "edgecache/routing.hpp"

namespace edgecache {

struct PolicyStepRecord {
    int slot = 0;
    double latency_cost = 0.0;
    double install_cost = 0.0;  // realized, charged against the previous slot's cache
    // For ROCR: beta * (0->1 flips over all paths) / K. Equals install_cost otherwise.
    double expected_install_cost = 0.0;
    std::vector<double> cache;  // cache in force during the slot
    RoutingVector routing;
    std::vector<double> subgradient;

    double total_cost() const noexcept { return latency_cost + install_cost; }
};

/// Fractional lazy-projection policies (OCR and OGA). previous_cache is
/// X_{t-1}, used to charge installation at slot t; X_0 = 0.
struct FractionalState {
    CacherState cacher;
    std::vector<double> previous_cache;

    static FractionalState initial(std::size_t n_services, double eta);
};

/// Routes on the fractional X_t, charges beta ||X_t - X_{t-1}||_+ and moves
/// the cache with the routing subgradient.
std::pair<PolicyStepRecord, FractionalState> ocr_step(const Instance& instance,
                                                      const FractionalState& state,
                                                      const SlotArrivals& arrivals);

/// Same plumbing as ocr_step, but the cache moves along +[lambda_n d_n]
/// regardless of the edge's computation latency.
std::pair<PolicyStepRecord, FractionalState> oga_step(const Instance& instance,
                                                      const FractionalState& state,
                                                      const SlotArrivals& arrivals);

enum class GradientSource {
    ActivePath,       // subgradient at the realized integer cache R_{k*,t}
    QuantizedCache,   // subgradient at the fractional X^Q_t (comparison variant)
};

struct RocrState {
    CacherState cacher;
    QuantizedCache quantized;
    SamplePathSet paths;
    Rng rng;
    GradientSource gradient_source = GradientSource::ActivePath;
    // 0->1 flips produced by the last advance, charged at the next slot.
    int pending_active_installs = 0;
    int pending_total_installs = 0;

    static RocrState initial(std::size_t n_services, int capacity, double eta, int granularity,
                             std::uint64_t seed,
                             GradientSource source = GradientSource::ActivePath);
};

std::pair<PolicyStepRecord, RocrState> rocr_step(const Instance& instance, const RocrState& state,
                                                 const SlotArrivals& arrivals);

struct OfflineSolution {
    std::vector<double> cache;  // binary X^o
    std::vector<double> scores; // d_n * sum_t lambda_{n,t}
};

/// Caches the min(Z, #positive scores) services with the largest
/// d_n * sum_t lambda_{n,t}; ties go to the lower index.
OfflineSolution solve_offline_static(const ServiceCatalog& catalog,
                                     std::span<const SlotArrivals> trace);

PolicyStepRecord offline_step(const Instance& instance, const OfflineSolution& solution,
                              const SlotArrivals& arrivals);

struct RegretSeries {
    std::vector<double> cumulative;
    std::vector<double> per_slot;  // cumulative[t] / (t + 1)
};

struct SlotCost {
    double latency = 0.0;
    double install = 0.0;
    double expected_install = 0.0;
};

/// Reg(t) = sum_{s<=t} (latency_s + install_s - offline_latency_s).
RegretSeries regret(std::span<const SlotCost> costs, std::span<const double> offline_latency);
RegretSeries regret(std::span<const PolicyStepRecord> records,
                    std::span<const double> offline_latency);

enum class PolicyKind { Ocr, Rocr, RocrQuantizedGradient, Oga, Offline };

std::string policy_name(PolicyKind kind);
std::optional<PolicyKind> parse_policy(std::string_view name);

struct PolicyOptions {
    double eta = 0.05;
    int granularity = 100;  // K
    std::uint64_t seed = 1;
};

/// Uniform stepping interface over the per-slot policies.
class Policy {
public:
    virtual ~Policy() = default;
    virtual PolicyKind kind() const noexcept = 0;
    virtual PolicyStepRecord step(const SlotArrivals& arrivals) = 0;
    std::string name() const { return policy_name(kind()); }
};

/// The offline policy needs the solution computed from the full trace.
std::unique_ptr<Policy> make_policy(PolicyKind kind, const Instance& instance,
                                    const PolicyOptions& options,
                                    const OfflineSolution* offline = nullptr);

}  // namespace edgecache
