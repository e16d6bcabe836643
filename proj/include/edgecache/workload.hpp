#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgecache/model.hpp"
#include "edgecache/rounding.hpp"

namespace edgecache {

struct WorkloadSpec {
    std::size_t n_services = 1000;
    int horizon = 10000;
    double zipf_exponent = 0.8;
    double requests_per_slot = 100.0;  // also the arrival bound W
    int shuffle_period = 50;           // 0 disables shuffling
    double shuffle_fraction = 0.2;
    std::uint64_t seed = 1;
    bool sample_counts = false;  // multinomial integer counts instead of expected rates

    void validate() const;
};

/// Arrival trace with its arrival bound W = max_t sum_n lambda_{n,t}.
struct Trace {
    std::size_t n_services = 0;
    std::vector<SlotArrivals> slots;
    double arrival_bound = 0.0;

    int horizon() const noexcept { return static_cast<int>(slots.size()); }
    std::vector<double> totals_per_service() const;
};

/// Zipf popularity over a rank permutation that is partially reshuffled every
/// shuffle_period slots. Slots must be drawn in order 1, 2, ..., T.
class SyntheticWorkload {
public:
    explicit SyntheticWorkload(WorkloadSpec spec);

    const WorkloadSpec& spec() const noexcept { return spec_; }
    SlotArrivals generate_slot(int t);

    /// rank_of()[n] is service n's 0-based popularity rank.
    const std::vector<std::size_t>& rank_of() const noexcept { return rank_of_; }

private:
    void shuffle_ranks();

    WorkloadSpec spec_;
    Rng rng_;
    std::vector<double> rank_share_;       // share of rank r, sums to 1
    std::vector<std::size_t> rank_of_;     // service -> rank
    std::vector<std::size_t> service_at_;  // rank -> service
    int next_slot_ = 1;
};

Trace generate_trace(const WorkloadSpec& spec);

class TraceParseError : public std::runtime_error {
public:
    TraceParseError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Reads `t,service,lambda` rows (1-based slots, 0-based services). Slots and
/// services that never appear are densified to zero. n_services = 0 infers N
/// from the largest service id.
Trace read_trace(std::istream& in, std::size_t n_services = 0);
Trace read_trace(const std::filesystem::path& path, std::size_t n_services = 0);

/// Writes nonzero entries in (t, service) order with shortest round-trip
/// number formatting.
void write_trace(const Trace& trace, std::ostream& out);
void write_trace(const Trace& trace, const std::filesystem::path& path);

std::string format_number(double value);

}  // namespace edgecache
