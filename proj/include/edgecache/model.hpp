#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace edgecache {

// Raised when the total edge load reaches the latency function's ceiling.
class LoadCeilingError : public std::domain_error {
public:
    LoadCeilingError(double load, double ceiling);

    double load() const noexcept { return load_; }
    double ceiling() const noexcept { return ceiling_; }

private:
    double load_;
    double ceiling_;
};

/// Static problem instance: per-service forwarding latency d_n and the
/// number of services Z the edge server can hold.
class ServiceCatalog {
public:
    ServiceCatalog(std::vector<double> forwarding_latency, int capacity);

    std::size_t size() const noexcept { return forwarding_latency_.size(); }
    int capacity() const noexcept { return capacity_; }
    double forwarding_latency(std::size_t n) const { return forwarding_latency_[n]; }
    std::span<const double> forwarding_latencies() const noexcept { return forwarding_latency_; }
    double max_forwarding_latency() const noexcept;
    double min_forwarding_latency() const noexcept;

    /// Service indices sorted by d descending; ties keep ascending index.
    std::span<const std::size_t> descending_order() const noexcept { return order_; }

private:
    std::vector<double> forwarding_latency_;
    int capacity_;
    std::vector<std::size_t> order_;
};

struct SlotArrivals {
    std::vector<double> rates;
    int slot = 0;

    double total() const noexcept;
};

void validate_arrivals(const SlotArrivals& arrivals, std::size_t n_services,
                       std::optional<double> bound = std::nullopt);

/// Per-request computation latency c(s) at total edge load s. Implementations
/// must be convex, nondecreasing and differentiable on [0, load_ceiling()).
class LatencyFunction {
public:
    virtual ~LatencyFunction() = default;

    virtual double cost(double load) const = 0;
    virtual double derivative(double load) const = 0;
    virtual double load_ceiling() const noexcept = 0;
    virtual std::string describe() const = 0;

    /// Marginal latency J(s) = c(s) + s c'(s); +inf at or beyond the ceiling.
    virtual double marginal(double load) const;

    /// Load s with J(s) == target when a closed form exists.
    virtual std::optional<double> load_at_marginal(double target) const;
};

/// M/M/1 server with service rate phi: c(s) = 1 / (phi - s).
class Mm1Latency final : public LatencyFunction {
public:
    explicit Mm1Latency(double service_rate);

    double service_rate() const noexcept { return phi_; }

    double cost(double load) const override;
    double derivative(double load) const override;
    double load_ceiling() const noexcept override { return phi_; }
    std::string describe() const override;
    double marginal(double load) const override;
    std::optional<double> load_at_marginal(double target) const override;

private:
    double phi_;
};

/// c(s) = base + scale * s^exponent with exponent >= 1. No load ceiling;
/// used for models without a closed-form water level.
class PolynomialLatency final : public LatencyFunction {
public:
    PolynomialLatency(double base, double scale, double exponent);

    double cost(double load) const override;
    double derivative(double load) const override;
    double load_ceiling() const noexcept override;
    std::string describe() const override;

private:
    double base_;
    double scale_;
    double exponent_;
};

struct CostParams {
    double install_cost = 0.0;  // beta, per newly cached service
};

// Fractional caching decision X_t: entry n is the probability of caching n.
struct CacheVector {
    std::vector<double> x;

    std::size_t size() const noexcept { return x.size(); }
    double total() const noexcept;
};

// Fraction y_n of service n's requests processed at the edge.
struct RoutingVector {
    std::vector<double> y;

    std::size_t size() const noexcept { return y.size(); }
};

inline constexpr double kFeasibilityTol = 1e-9;

void validate_cache(const CacheVector& cache, const ServiceCatalog& catalog,
                    double tol = kFeasibilityTol);

/// A catalog paired with a latency model and cost parameters. Construction
/// checks 0 <= c(0) <= min_n d_n.
struct Instance {
    Instance(ServiceCatalog catalog, std::shared_ptr<const LatencyFunction> latency,
             CostParams costs);

    ServiceCatalog catalog;
    std::shared_ptr<const LatencyFunction> latency;
    CostParams costs;
};

/// Sum of lambda_n * y_n.
double edge_load(const SlotArrivals& arrivals, std::span<const double> y);

/// L_t(Y) = s c(s) + sum_n lambda_n (1 - y_n) d_n.
double eval_latency_cost(const ServiceCatalog& catalog, const SlotArrivals& arrivals,
                         const LatencyFunction& latency, std::span<const double> y);

/// J_t(Y) = c(s) + s c'(s).
double eval_marginal(const ServiceCatalog& catalog, const SlotArrivals& arrivals,
                     const LatencyFunction& latency, std::span<const double> y);

/// ||a - b||_+ = sum_n max(a_n - b_n, 0).
double positive_part_distance(std::span<const double> a, std::span<const double> b);

}  // namespace edgecache
