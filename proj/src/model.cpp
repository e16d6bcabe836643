#include "edgecache/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace edgecache {

namespace {

std::string ceiling_message(double load, double ceiling) {
    std::ostringstream os;
    os << "edge load " << load << " reaches the latency load ceiling " << ceiling;
    return os.str();
}

void check_size(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        std::ostringstream os;
        os << what << " has " << got << " entries, expected " << want;
        throw std::invalid_argument(os.str());
    }
}

void check_below_ceiling(const LatencyFunction& latency, double load) {
    if (!(load < latency.load_ceiling())) throw LoadCeilingError(load, latency.load_ceiling());
}

}  // namespace

LoadCeilingError::LoadCeilingError(double load, double ceiling)
    : std::domain_error(ceiling_message(load, ceiling)), load_(load), ceiling_(ceiling) {}

ServiceCatalog::ServiceCatalog(std::vector<double> forwarding_latency, int capacity)
    : forwarding_latency_(std::move(forwarding_latency)), capacity_(capacity) {
    if (forwarding_latency_.empty()) throw std::invalid_argument("catalog needs at least one service");
    if (capacity_ < 1) throw std::invalid_argument("capacity Z must be >= 1");
    for (std::size_t n = 0; n < forwarding_latency_.size(); ++n) {
        const double d = forwarding_latency_[n];
        if (!std::isfinite(d) || d <= 0.0) {
            throw std::invalid_argument("forwarding latency of service " + std::to_string(n) +
                                        " must be finite and > 0");
        }
    }
    order_.resize(forwarding_latency_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(), [this](std::size_t a, std::size_t b) {
        return forwarding_latency_[a] > forwarding_latency_[b];
    });
}

double ServiceCatalog::max_forwarding_latency() const noexcept {
    return *std::max_element(forwarding_latency_.begin(), forwarding_latency_.end());
}

double ServiceCatalog::min_forwarding_latency() const noexcept {
    return *std::min_element(forwarding_latency_.begin(), forwarding_latency_.end());
}

double SlotArrivals::total() const noexcept {
    return std::accumulate(rates.begin(), rates.end(), 0.0);
}

void validate_arrivals(const SlotArrivals& arrivals, std::size_t n_services,
                       std::optional<double> bound) {
    check_size(arrivals.rates.size(), n_services, "arrival vector");
    for (std::size_t n = 0; n < n_services; ++n) {
        const double r = arrivals.rates[n];
        if (!std::isfinite(r) || r < 0.0) {
            throw std::invalid_argument("arrival rate of service " + std::to_string(n) + " in slot " +
                                        std::to_string(arrivals.slot) + " must be finite and >= 0");
        }
    }
    if (bound && arrivals.total() > *bound * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "total arrival rate " << arrivals.total() << " in slot " << arrivals.slot
           << " exceeds the bound W=" << *bound;
        throw std::invalid_argument(os.str());
    }
}

double LatencyFunction::marginal(double load) const {
    if (!(load < load_ceiling())) return std::numeric_limits<double>::infinity();
    return cost(load) + load * derivative(load);
}

std::optional<double> LatencyFunction::load_at_marginal(double) const { return std::nullopt; }

Mm1Latency::Mm1Latency(double service_rate) : phi_(service_rate) {
    if (!std::isfinite(phi_) || phi_ <= 0.0) throw std::invalid_argument("M/M/1 service rate must be > 0");
}

double Mm1Latency::cost(double load) const {
    check_below_ceiling(*this, load);
    return 1.0 / (phi_ - load);
}

double Mm1Latency::derivative(double load) const {
    check_below_ceiling(*this, load);
    const double gap = phi_ - load;
    return 1.0 / (gap * gap);
}

std::string Mm1Latency::describe() const {
    std::ostringstream os;
    os << "MM1(phi=" << phi_ << ")";
    return os.str();
}

double Mm1Latency::marginal(double load) const {
    if (!(load < phi_)) return std::numeric_limits<double>::infinity();
    const double gap = phi_ - load;
    return phi_ / (gap * gap);
}

// phi / (phi - s)^2 = target  =>  s = phi - sqrt(phi / target)
std::optional<double> Mm1Latency::load_at_marginal(double target) const {
    if (!(target > 0.0)) return std::nullopt;
    return phi_ - std::sqrt(phi_ / target);
}

PolynomialLatency::PolynomialLatency(double base, double scale, double exponent)
    : base_(base), scale_(scale), exponent_(exponent) {
    if (!(base >= 0.0) || !(scale > 0.0) || !(exponent >= 1.0)) {
        throw std::invalid_argument("polynomial latency needs base >= 0, scale > 0, exponent >= 1");
    }
}

double PolynomialLatency::cost(double load) const {
    return base_ + scale_ * std::pow(load, exponent_);
}

double PolynomialLatency::derivative(double load) const {
    return scale_ * exponent_ * std::pow(load, exponent_ - 1.0);
}

double PolynomialLatency::load_ceiling() const noexcept {
    return std::numeric_limits<double>::infinity();
}

std::string PolynomialLatency::describe() const {
    std::ostringstream os;
    os << "Poly(" << base_ << " + " << scale_ << "*s^" << exponent_ << ")";
    return os.str();
}

double CacheVector::total() const noexcept { return std::accumulate(x.begin(), x.end(), 0.0); }

void validate_cache(const CacheVector& cache, const ServiceCatalog& catalog, double tol) {
    check_size(cache.size(), catalog.size(), "cache vector");
    for (std::size_t n = 0; n < cache.size(); ++n) {
        const double v = cache.x[n];
        if (!(v >= -tol && v <= 1.0 + tol)) {
            throw std::invalid_argument("cache entry " + std::to_string(n) + " outside [0,1]");
        }
    }
    if (cache.total() > catalog.capacity() + tol) {
        std::ostringstream os;
        os << "cache occupancy " << cache.total() << " exceeds capacity " << catalog.capacity();
        throw std::invalid_argument(os.str());
    }
}

Instance::Instance(ServiceCatalog catalog_, std::shared_ptr<const LatencyFunction> latency_,
                   CostParams costs_)
    : catalog(std::move(catalog_)), latency(std::move(latency_)), costs(costs_) {
    if (!latency) throw std::invalid_argument("instance needs a latency function");
    if (!(costs.install_cost >= 0.0)) throw std::invalid_argument("install cost beta must be >= 0");
    const double c0 = latency->cost(0.0);
    if (!(c0 >= 0.0) || c0 > catalog.min_forwarding_latency()) {
        std::ostringstream os;
        os << "latency model " << latency->describe() << " has c(0)=" << c0
           << ", must lie in [0, min d_n=" << catalog.min_forwarding_latency() << "]";
        throw std::invalid_argument(os.str());
    }
}

double edge_load(const SlotArrivals& arrivals, std::span<const double> y) {
    check_size(y.size(), arrivals.rates.size(), "routing vector");
    double s = 0.0;
    for (std::size_t n = 0; n < y.size(); ++n) s += arrivals.rates[n] * y[n];
    return s;
}

double eval_latency_cost(const ServiceCatalog& catalog, const SlotArrivals& arrivals,
                         const LatencyFunction& latency, std::span<const double> y) {
    check_size(y.size(), catalog.size(), "routing vector");
    const double s = edge_load(arrivals, y);
    check_below_ceiling(latency, s);
    double forwarded = 0.0;
    for (std::size_t n = 0; n < y.size(); ++n) {
        forwarded += arrivals.rates[n] * (1.0 - y[n]) * catalog.forwarding_latency(n);
    }
    return (s > 0.0 ? s * latency.cost(s) : 0.0) + forwarded;
}

double eval_marginal(const ServiceCatalog& catalog, const SlotArrivals& arrivals,
                     const LatencyFunction& latency, std::span<const double> y) {
    check_size(y.size(), catalog.size(), "routing vector");
    const double s = edge_load(arrivals, y);
    check_below_ceiling(latency, s);
    return latency.marginal(s);
}

double positive_part_distance(std::span<const double> a, std::span<const double> b) {
    check_size(a.size(), b.size(), "cache vector");
    double total = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) total += std::max(a[n] - b[n], 0.0);
    return total;
}

}  // namespace edgecache
