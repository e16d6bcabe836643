#include "edgecache/workload.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <string_view>

namespace edgecache {

void WorkloadSpec::validate() const {
    if (n_services < 1) throw std::invalid_argument("workload n_services must be >= 1");
    if (horizon < 1) throw std::invalid_argument("workload horizon must be >= 1");
    if (!(zipf_exponent > 0.0)) throw std::invalid_argument("zipf_exponent must be > 0");
    if (!(requests_per_slot > 0.0)) throw std::invalid_argument("requests_per_slot must be > 0");
    if (shuffle_period < 0) throw std::invalid_argument("shuffle_period must be >= 0");
    if (!(shuffle_fraction >= 0.0 && shuffle_fraction <= 1.0)) {
        throw std::invalid_argument("shuffle_fraction must lie in [0,1]");
    }
}

std::vector<double> Trace::totals_per_service() const {
    std::vector<double> totals(n_services, 0.0);
    for (const SlotArrivals& slot : slots) {
        for (std::size_t n = 0; n < n_services; ++n) totals[n] += slot.rates[n];
    }
    return totals;
}

SyntheticWorkload::SyntheticWorkload(WorkloadSpec spec) : spec_(std::move(spec)), rng_(spec_.seed) {
    spec_.validate();
    const std::size_t n = spec_.n_services;
    rank_share_.resize(n);
    double norm = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        rank_share_[r] = std::pow(static_cast<double>(r + 1), -spec_.zipf_exponent);
        norm += rank_share_[r];
    }
    for (double& share : rank_share_) share /= norm;

    service_at_.resize(n);
    std::iota(service_at_.begin(), service_at_.end(), std::size_t{0});
    std::shuffle(service_at_.begin(), service_at_.end(), rng_);
    rank_of_.resize(n);
    for (std::size_t r = 0; r < n; ++r) rank_of_[service_at_[r]] = r;
}

void SyntheticWorkload::shuffle_ranks() {
    const std::size_t n = spec_.n_services;
    const auto moved = static_cast<std::size_t>(
        std::ceil(spec_.shuffle_fraction * static_cast<double>(n) - 1e-12));
    if (moved < 2) return;
    std::vector<std::size_t> ranks(n);
    std::iota(ranks.begin(), ranks.end(), std::size_t{0});
    for (std::size_t i = 0; i < moved; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(ranks[i], ranks[pick(rng_)]);
    }
    ranks.resize(moved);
    std::vector<std::size_t> services(moved);
    for (std::size_t i = 0; i < moved; ++i) services[i] = service_at_[ranks[i]];
    std::shuffle(services.begin(), services.end(), rng_);
    for (std::size_t i = 0; i < moved; ++i) {
        service_at_[ranks[i]] = services[i];
        rank_of_[services[i]] = ranks[i];
    }
}

SlotArrivals SyntheticWorkload::generate_slot(int t) {
    if (t != next_slot_ || t > spec_.horizon) {
        throw std::logic_error("synthetic workload slots must be drawn in order within the horizon");
    }
    ++next_slot_;
    if (spec_.shuffle_period > 0 && t > 1 && (t - 1) % spec_.shuffle_period == 0) shuffle_ranks();

    const std::size_t n = spec_.n_services;
    SlotArrivals out;
    out.slot = t;
    out.rates.assign(n, 0.0);
    if (!spec_.sample_counts) {
        for (std::size_t s = 0; s < n; ++s) out.rates[s] = spec_.requests_per_slot * rank_share_[rank_of_[s]];
        return out;
    }
    // Multinomial over ranks via conditional binomials; the total never exceeds W.
    auto remaining = static_cast<long>(std::floor(spec_.requests_per_slot));
    double mass_left = 1.0;
    for (std::size_t r = 0; r < n && remaining > 0; ++r) {
        const double p = std::clamp(rank_share_[r] / mass_left, 0.0, 1.0);
        std::binomial_distribution<long> draw(remaining, p);
        const long count = r + 1 == n ? remaining : draw(rng_);
        out.rates[service_at_[r]] = static_cast<double>(count);
        remaining -= count;
        mass_left -= rank_share_[r];
    }
    return out;
}

Trace generate_trace(const WorkloadSpec& spec) {
    SyntheticWorkload workload(spec);
    Trace trace;
    trace.n_services = spec.n_services;
    trace.slots.reserve(static_cast<std::size_t>(spec.horizon));
    for (int t = 1; t <= spec.horizon; ++t) trace.slots.push_back(workload.generate_slot(t));
    trace.arrival_bound = spec.requests_per_slot;
    return trace;
}

TraceParseError::TraceParseError(std::size_t line, const std::string& what)
    : std::runtime_error("trace line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_field(std::string_view field, std::size_t line, const char* name) {
    field = trim(field);
    T value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
        throw TraceParseError(line, std::string("non-numeric ") + name + " '" + std::string(field) + "'");
    }
    return value;
}

}  // namespace

Trace read_trace(std::istream& in, std::size_t n_services) {
    std::map<std::pair<long, long>, double> entries;
    std::map<std::pair<long, long>, std::size_t> seen_at;
    std::string raw;
    std::size_t line = 0;
    bool header_seen = false;
    long max_slot = 0;
    long max_service = -1;
    while (std::getline(in, raw)) {
        ++line;
        const std::string_view row = trim(raw);
        if (row.empty()) continue;
        if (!header_seen) {
            if (row != "t,service,lambda") throw TraceParseError(line, "expected header 't,service,lambda'");
            header_seen = true;
            continue;
        }
        const auto c1 = row.find(',');
        const auto c2 = c1 == std::string_view::npos ? c1 : row.find(',', c1 + 1);
        if (c2 == std::string_view::npos || row.find(',', c2 + 1) != std::string_view::npos) {
            throw TraceParseError(line, "expected 3 comma-separated fields");
        }
        const long t = parse_field<long>(row.substr(0, c1), line, "slot");
        const long service = parse_field<long>(row.substr(c1 + 1, c2 - c1 - 1), line, "service");
        const double lambda = parse_field<double>(row.substr(c2 + 1), line, "lambda");
        if (t < 1) throw TraceParseError(line, "slot must be >= 1");
        if (service < 0) throw TraceParseError(line, "service id must be >= 0");
        if (n_services > 0 && static_cast<std::size_t>(service) >= n_services) {
            throw TraceParseError(line, "service id " + std::to_string(service) + " >= N");
        }
        if (!std::isfinite(lambda) || lambda < 0.0) throw TraceParseError(line, "lambda must be finite and >= 0");
        const auto key = std::make_pair(t, service);
        if (auto it = seen_at.find(key); it != seen_at.end()) {
            throw TraceParseError(line, "duplicate row for slot " + std::to_string(t) + ", service " +
                                            std::to_string(service) + " (first at line " +
                                            std::to_string(it->second) + ")");
        }
        seen_at.emplace(key, line);
        entries.emplace(key, lambda);
        max_slot = std::max(max_slot, t);
        max_service = std::max(max_service, service);
    }
    if (!header_seen) throw TraceParseError(line, "empty trace");

    Trace trace;
    trace.n_services = n_services > 0 ? n_services : static_cast<std::size_t>(max_service + 1);
    trace.slots.resize(static_cast<std::size_t>(max_slot));
    for (long t = 1; t <= max_slot; ++t) {
        SlotArrivals& slot = trace.slots[static_cast<std::size_t>(t - 1)];
        slot.slot = static_cast<int>(t);
        slot.rates.assign(trace.n_services, 0.0);
    }
    for (const auto& [key, lambda] : entries) {
        trace.slots[static_cast<std::size_t>(key.first - 1)].rates[static_cast<std::size_t>(key.second)] = lambda;
    }
    for (const SlotArrivals& slot : trace.slots) trace.arrival_bound = std::max(trace.arrival_bound, slot.total());
    return trace;
}

Trace read_trace(const std::filesystem::path& path, std::size_t n_services) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file " + path.string());
    return read_trace(in, n_services);
}

std::string format_number(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf, ptr);
}

void write_trace(const Trace& trace, std::ostream& out) {
    out << "t,service,lambda\n";
    for (const SlotArrivals& slot : trace.slots) {
        for (std::size_t n = 0; n < slot.rates.size(); ++n) {
            if (slot.rates[n] == 0.0) continue;
            out << slot.slot << ',' << n << ',' << format_number(slot.rates[n]) << '\n';
        }
    }
}

void write_trace(const Trace& trace, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trace file " + path.string());
    write_trace(trace, out);
    if (!out) throw std::runtime_error("failed writing trace file " + path.string());
}

}  // namespace edgecache
