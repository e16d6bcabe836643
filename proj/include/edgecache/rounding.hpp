#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "edgecache/model.hpp"

namespace edgecache {

using Rng = std::mt19937_64;

/// Cache vector on the 1/K grid, held as integer units: xq_n = units[n] / K.
struct QuantizedCache {
    std::vector<int> units;
    int granularity = 1;  // K

    std::size_t size() const noexcept { return units.size(); }
    double value(std::size_t n) const { return static_cast<double>(units[n]) / granularity; }
    std::vector<double> values() const;
    int total_units() const noexcept;

    static QuantizedCache zeros(std::size_t n_services, int granularity);
};

/// Largest-remainder rounding of x onto the 1/K grid. The total is
/// min(round(sum K x_n), K Z) units; leftover units go to the largest
/// fractional remainders, ties to the lower index.
QuantizedCache quantize(const CacheVector& x, int granularity, int capacity);

/// K binary cache vectors, each carrying probability mass 1/K. Storage is
/// service-major so per-service eligibility scans are contiguous.
class SamplePathSet {
public:
    SamplePathSet(std::size_t n_services, int n_paths, int capacity, std::size_t active_path);

    /// All-empty paths with the active path drawn uniformly from rng.
    static SamplePathSet empty(std::size_t n_services, int n_paths, int capacity, Rng& rng);

    std::size_t n_services() const noexcept { return n_services_; }
    int n_paths() const noexcept { return n_paths_; }
    int capacity() const noexcept { return capacity_; }
    std::size_t active_path() const noexcept { return active_; }

    bool cached(std::size_t path, std::size_t service) const {
        return bits_[service * n_paths_ + path] != 0;
    }
    void set(std::size_t path, std::size_t service, bool value);

    int path_load(std::size_t path) const { return path_load_[path]; }
    int service_count(std::size_t service) const;

    /// Path as a 0/1 vector over services.
    std::vector<double> path_vector(std::size_t path) const;

    bool operator==(const SamplePathSet&) const = default;

private:
    std::size_t n_services_;
    int n_paths_;
    int capacity_;
    std::size_t active_;
    std::vector<std::uint8_t> bits_;
    std::vector<int> path_load_;
};

struct AdvanceStats {
    int increments = 0;    // 0->1 flips from the per-service adjustment
    int decrements = 0;    // 1->0 flips from the per-service adjustment
    int rebalance_swaps = 0;
};

struct AdvanceResult {
    SamplePathSet paths;
    AdvanceStats stats;
};

/// Moves the sample paths from marginals xq_old to xq_new. Each service with
/// a positive delta is switched on in K*delta uniformly chosen paths that lack
/// it (off symmetrically for negative deltas); overfull paths then hand one
/// service at a time to the lowest-index underfull path. Throws
/// std::logic_error if the input paths do not realize xq_old.
AdvanceResult rocr_advance(const SamplePathSet& paths, const QuantizedCache& xq_old,
                           const QuantizedCache& xq_new, Rng& rng);

/// Number of services switched 0->1 on one path.
int realized_install_count(const SamplePathSet& before, const SamplePathSet& after,
                           std::size_t path);

/// Same count summed over all paths.
int total_install_count(const SamplePathSet& before, const SamplePathSet& after);

/// Sum of positive unit increments from old to new, i.e. K * ||xq_new - xq_old||_+.
int positive_unit_change(const QuantizedCache& xq_old, const QuantizedCache& xq_new);

}  // namespace edgecache
