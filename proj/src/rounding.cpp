#include "edgecache/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace edgecache {

std::vector<double> QuantizedCache::values() const {
    std::vector<double> out(units.size());
    for (std::size_t n = 0; n < units.size(); ++n) out[n] = value(n);
    return out;
}

int QuantizedCache::total_units() const noexcept {
    return std::accumulate(units.begin(), units.end(), 0);
}

QuantizedCache QuantizedCache::zeros(std::size_t n_services, int granularity) {
    if (granularity < 1) throw std::invalid_argument("granularity K must be >= 1");
    return QuantizedCache{std::vector<int>(n_services, 0), granularity};
}

QuantizedCache quantize(const CacheVector& x, int granularity, int capacity) {
    QuantizedCache out = QuantizedCache::zeros(x.size(), granularity);
    const double k = granularity;
    std::vector<double> remainder(x.size());
    double scaled_total = 0.0;
    long floors = 0;
    for (std::size_t n = 0; n < x.size(); ++n) {
        const double scaled = k * std::clamp(x.x[n], 0.0, 1.0);
        const double whole = std::floor(scaled);
        out.units[n] = static_cast<int>(whole);
        remainder[n] = scaled - whole;
        scaled_total += scaled;
        floors += out.units[n];
    }
    const long cap = static_cast<long>(granularity) * capacity;
    const long target = std::min(std::lround(scaled_total), cap);

    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    long extra = target - floors;
    for (std::size_t n : order) {
        if (extra <= 0) break;
        if (out.units[n] >= granularity) continue;
        ++out.units[n];
        --extra;
    }
    // Floors alone overshoot K*Z when x is over budget; shed units from the
    // smallest remainders first, one per service per pass.
    while (extra < 0) {
        for (auto it = order.rbegin(); extra < 0 && it != order.rend(); ++it) {
            if (out.units[*it] > 0) {
                --out.units[*it];
                ++extra;
            }
        }
    }
    return out;
}

SamplePathSet::SamplePathSet(std::size_t n_services, int n_paths, int capacity,
                             std::size_t active_path)
    : n_services_(n_services),
      n_paths_(n_paths),
      capacity_(capacity),
      active_(active_path),
      bits_(n_services * static_cast<std::size_t>(std::max(n_paths, 0)), 0),
      path_load_(static_cast<std::size_t>(std::max(n_paths, 0)), 0) {
    if (n_paths < 1) throw std::invalid_argument("need at least one sample path");
    if (capacity < 0) throw std::invalid_argument("path capacity must be >= 0");
    if (active_path >= static_cast<std::size_t>(n_paths)) {
        throw std::invalid_argument("active path index out of range");
    }
}

SamplePathSet SamplePathSet::empty(std::size_t n_services, int n_paths, int capacity, Rng& rng) {
    if (n_paths < 1) throw std::invalid_argument("need at least one sample path");
    std::uniform_int_distribution<std::size_t> pick(0, static_cast<std::size_t>(n_paths) - 1);
    const std::size_t active = pick(rng);
    return SamplePathSet(n_services, n_paths, capacity, active);
}

void SamplePathSet::set(std::size_t path, std::size_t service, bool value) {
    std::uint8_t& bit = bits_[service * n_paths_ + path];
    if (static_cast<bool>(bit) == value) return;
    bit = value ? 1 : 0;
    path_load_[path] += value ? 1 : -1;
}

int SamplePathSet::service_count(std::size_t service) const {
    const auto begin = bits_.begin() + static_cast<std::ptrdiff_t>(service * n_paths_);
    return static_cast<int>(std::count(begin, begin + n_paths_, std::uint8_t{1}));
}

std::vector<double> SamplePathSet::path_vector(std::size_t path) const {
    std::vector<double> out(n_services_);
    for (std::size_t n = 0; n < n_services_; ++n) out[n] = cached(path, n) ? 1.0 : 0.0;
    return out;
}

namespace {

// Flip `count` uniformly chosen paths whose bit for `service` equals `from`.
void flip_random_paths(SamplePathSet& paths, std::size_t service, bool from, int count,
                       Rng& rng) {
    std::vector<std::size_t> eligible;
    for (int k = 0; k < paths.n_paths(); ++k) {
        if (paths.cached(k, service) == from) eligible.push_back(static_cast<std::size_t>(k));
    }
    if (static_cast<int>(eligible.size()) < count) {
        throw std::logic_error("rocr_advance: not enough eligible paths for service " +
                               std::to_string(service));
    }
    // Partial Fisher-Yates.
    for (int i = 0; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i),
                                                        eligible.size() - 1);
        std::swap(eligible[static_cast<std::size_t>(i)], eligible[pick(rng)]);
        paths.set(eligible[static_cast<std::size_t>(i)], service, !from);
    }
}

}  // namespace

AdvanceResult rocr_advance(const SamplePathSet& paths, const QuantizedCache& xq_old,
                           const QuantizedCache& xq_new, Rng& rng) {
    const std::size_t n_services = paths.n_services();
    const int k_paths = paths.n_paths();
    const int capacity = paths.capacity();
    if (xq_old.size() != n_services || xq_new.size() != n_services ||
        xq_old.granularity != k_paths || xq_new.granularity != k_paths) {
        throw std::logic_error("rocr_advance: marginal vectors do not match the path set");
    }
    if (xq_new.total_units() > k_paths * capacity) {
        throw std::logic_error("rocr_advance: target marginals exceed path capacity");
    }

    AdvanceResult result{paths, {}};
    SamplePathSet& next = result.paths;
    for (std::size_t n = 0; n < n_services; ++n) {
        if (paths.service_count(n) != xq_old.units[n]) {
            throw std::logic_error("rocr_advance: paths do not realize the old marginal of service " +
                                   std::to_string(n));
        }
        if (xq_new.units[n] < 0 || xq_new.units[n] > k_paths) {
            throw std::logic_error("rocr_advance: target marginal out of range for service " +
                                   std::to_string(n));
        }
        const int delta = xq_new.units[n] - xq_old.units[n];
        if (delta > 0) {
            flip_random_paths(next, n, false, delta, rng);
            result.stats.increments += delta;
        } else if (delta < 0) {
            flip_random_paths(next, n, true, -delta, rng);
            result.stats.decrements += -delta;
        }
    }

    // Overfull paths never drop below capacity and donors only fill up, so
    // the lowest underfull index is monotone.
    const int max_swaps = k_paths * capacity;
    int donor = 0;
    for (int over = 0; over < k_paths; ++over) {
        while (next.path_load(over) > capacity) {
            while (donor < k_paths && next.path_load(donor) >= capacity) ++donor;
            if (donor >= k_paths) throw std::logic_error("rocr_advance: no underfull path to rebalance");
            std::size_t moved = n_services;
            for (std::size_t n = 0; n < n_services; ++n) {
                if (next.cached(over, n) && !next.cached(donor, n)) {
                    moved = n;
                    break;
                }
            }
            if (moved == n_services) throw std::logic_error("rocr_advance: no swappable service");
            next.set(over, moved, false);
            next.set(donor, moved, true);
            if (++result.stats.rebalance_swaps > max_swaps) {
                throw std::logic_error("rocr_advance: rebalance exceeded K*Z iterations");
            }
        }
    }
    return result;
}

int realized_install_count(const SamplePathSet& before, const SamplePathSet& after,
                           std::size_t path) {
    if (before.n_services() != after.n_services() || before.n_paths() != after.n_paths()) {
        throw std::invalid_argument("realized_install_count: path sets differ in shape");
    }
    int count = 0;
    for (std::size_t n = 0; n < before.n_services(); ++n) {
        if (!before.cached(path, n) && after.cached(path, n)) ++count;
    }
    return count;
}

int total_install_count(const SamplePathSet& before, const SamplePathSet& after) {
    int count = 0;
    for (int k = 0; k < before.n_paths(); ++k) {
        count += realized_install_count(before, after, static_cast<std::size_t>(k));
    }
    return count;
}

int positive_unit_change(const QuantizedCache& xq_old, const QuantizedCache& xq_new) {
    if (xq_old.size() != xq_new.size()) throw std::invalid_argument("quantized caches differ in size");
    int total = 0;
    for (std::size_t n = 0; n < xq_old.size(); ++n) {
        total += std::max(xq_new.units[n] - xq_old.units[n], 0);
    }
    return total;
}

}  // namespace edgecache
