#include "edgecache/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

namespace edgecache {

ConfigError::ConfigError(const std::string& field, const std::string& what)
    : std::invalid_argument("config field '" + field + "': " + what), field_(field) {}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

template <typename T>
T parse_number(const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    T out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError(key, "cannot parse '" + value + "' as a number");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError(key, "expected true/false, got '" + value + "'");
}

}  // namespace

void ExperimentConfig::validate() const {
    if (n_services < 1) throw ConfigError("n_services", "must be >= 1");
    if (capacity < 1) throw ConfigError("z", "must be >= 1");
    if (!(d_min > 0.0)) throw ConfigError("d_min", "must be > 0");
    if (!(d_max >= d_min)) throw ConfigError("d_max", "must be >= d_min");
    if (!(phi > 0.0)) throw ConfigError("phi", "must be > 0");
    if (!(1.0 / phi <= d_min)) throw ConfigError("phi", "c(0) = 1/phi must not exceed d_min");
    if (!(beta >= 0.0)) throw ConfigError("beta", "must be >= 0");
    if (policies.empty()) throw ConfigError("policies", "at least one policy is required");
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw ConfigError("eta", "must be finite and >= 0");
    if (granularity < 1) throw ConfigError("k", "must be >= 1");
    if (horizon < 1) throw ConfigError("t", "must be >= 1");
    if (!(zipf_exponent > 0.0)) throw ConfigError("zipf_exponent", "must be > 0");
    if (!(requests_per_slot > 0.0)) throw ConfigError("requests_per_slot", "must be > 0");
    if (shuffle_period < 0) throw ConfigError("shuffle_period", "must be >= 0");
    if (!(shuffle_fraction >= 0.0 && shuffle_fraction <= 1.0)) {
        throw ConfigError("shuffle_fraction", "must lie in [0,1]");
    }
    if (seeds.empty()) throw ConfigError("seeds", "at least one seed is required");
    if (out_dir.empty()) throw ConfigError("out", "output directory must be set");
    if (sweep) {
        if (sweep->values.empty()) throw ConfigError("sweep", "needs at least one value");
        for (double v : sweep->values) {
            ExperimentConfig probe = *this;
            probe.sweep.reset();
            apply_setting(probe, sweep->parameter, format_number(v));
            probe.validate();
        }
    }
}

double ExperimentConfig::effective_eta() const {
    return eta_schedule == EtaSchedule::Constant ? eta : eta / std::sqrt(static_cast<double>(horizon));
}

WorkloadSpec ExperimentConfig::workload(std::uint64_t seed) const {
    WorkloadSpec spec;
    spec.n_services = n_services;
    spec.horizon = horizon;
    spec.zipf_exponent = zipf_exponent;
    spec.requests_per_slot = requests_per_slot;
    spec.shuffle_period = shuffle_period;
    spec.shuffle_fraction = shuffle_fraction;
    spec.seed = seed;
    spec.sample_counts = sample_counts;
    return spec;
}

void apply_setting(ExperimentConfig& config, const std::string& raw_key, const std::string& value) {
    const std::string key = trim(raw_key);
    if (key == "n_services" || key == "n") {
        config.n_services = parse_number<std::size_t>(key, value);
    } else if (key == "z" || key == "capacity") {
        config.capacity = parse_number<int>(key, value);
    } else if (key == "d_min") {
        config.d_min = parse_number<double>(key, value);
    } else if (key == "d_max") {
        config.d_max = parse_number<double>(key, value);
    } else if (key == "phi") {
        config.phi = parse_number<double>(key, value);
    } else if (key == "beta") {
        config.beta = parse_number<double>(key, value);
    } else if (key == "policies") {
        config.policies.clear();
        for (const std::string& name : split_list(value)) {
            auto kind = parse_policy(name);
            if (!kind) throw ConfigError(key, "unknown policy '" + name + "'");
            if (std::find(config.policies.begin(), config.policies.end(), *kind) == config.policies.end()) {
                config.policies.push_back(*kind);
            }
        }
    } else if (key == "eta") {
        config.eta = parse_number<double>(key, value);
    } else if (key == "eta_schedule") {
        const std::string v = trim(value);
        if (v == "constant") {
            config.eta_schedule = EtaSchedule::Constant;
        } else if (v == "inv_sqrt_t") {
            config.eta_schedule = EtaSchedule::InverseSqrtHorizon;
        } else {
            throw ConfigError(key, "expected 'constant' or 'inv_sqrt_t'");
        }
    } else if (key == "k") {
        config.granularity = parse_number<int>(key, value);
    } else if (key == "t" || key == "horizon") {
        config.horizon = parse_number<int>(key, value);
    } else if (key == "zipf_exponent") {
        config.zipf_exponent = parse_number<double>(key, value);
    } else if (key == "requests_per_slot") {
        config.requests_per_slot = parse_number<double>(key, value);
    } else if (key == "shuffle_period") {
        config.shuffle_period = parse_number<int>(key, value);
    } else if (key == "shuffle_fraction") {
        config.shuffle_fraction = parse_number<double>(key, value);
    } else if (key == "sample_counts") {
        config.sample_counts = parse_bool(key, value);
    } else if (key == "trace") {
        config.trace = trim(value);
    } else if (key == "seed" || key == "seeds") {
        config.seeds.clear();
        for (const std::string& s : split_list(value)) config.seeds.push_back(parse_number<std::uint64_t>(key, s));
    } else if (key == "out") {
        config.out_dir = trim(value);
    } else if (key == "sweep") {
        const std::string v = trim(value);
        if (v.empty() || v == "none") {
            config.sweep.reset();
            return;
        }
        const auto colon = v.find(':');
        if (colon == std::string::npos) throw ConfigError(key, "expected 'param:v1,v2,...'");
        SweepSpec sweep;
        sweep.parameter = trim(v.substr(0, colon));
        if (sweep.parameter != "phi" && sweep.parameter != "z" && sweep.parameter != "beta" &&
            sweep.parameter != "eta" && sweep.parameter != "k") {
            throw ConfigError(key, "cannot sweep '" + sweep.parameter + "'");
        }
        for (const std::string& s : split_list(v.substr(colon + 1))) {
            sweep.values.push_back(parse_number<double>(key, s));
        }
        config.sweep = std::move(sweep);
    } else {
        throw ConfigError(key, "unknown key");
    }
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string row = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (row.empty()) continue;
        const auto eq = row.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line), "expected key=value");
        }
        apply_setting(base, row.substr(0, eq), row.substr(eq + 1));
    }
    return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file " + path.string());
    return parse_config(in, std::move(base));
}

ServiceCatalog make_catalog(const ExperimentConfig& config, std::uint64_t seed) {
    std::seed_seq seq{seed, std::uint64_t{0xca7a1095}};
    Rng rng(seq);
    std::uniform_real_distribution<double> draw(config.d_min, config.d_max);
    std::vector<double> d(config.n_services);
    for (double& v : d) v = config.d_min == config.d_max ? config.d_min : draw(rng);
    return ServiceCatalog(std::move(d), config.capacity);
}

double PolicyRun::average_latency() const {
    double sum = 0.0;
    for (const SlotCost& c : costs) sum += c.latency;
    return costs.empty() ? 0.0 : sum / static_cast<double>(costs.size());
}

double PolicyRun::average_install() const {
    double sum = 0.0;
    for (const SlotCost& c : costs) sum += c.install;
    return costs.empty() ? 0.0 : sum / static_cast<double>(costs.size());
}

double PolicyRun::average_total() const { return average_latency() + average_install(); }

namespace {

std::vector<SlotCost> run_one(PolicyKind kind, const Instance& instance, const Trace& trace,
                              const PolicyOptions& options, const OfflineSolution& offline) {
    auto policy = make_policy(kind, instance, options, &offline);
    std::vector<SlotCost> costs;
    costs.reserve(trace.slots.size());
    for (const SlotArrivals& slot : trace.slots) {
        const PolicyStepRecord record = policy->step(slot);
        costs.push_back({record.latency_cost, record.install_cost, record.expected_install_cost});
    }
    return costs;
}

}  // namespace

std::vector<PolicyRun> run_policies(const Instance& instance, const Trace& trace,
                                    const std::vector<PolicyKind>& policies,
                                    const PolicyOptions& options,
                                    std::vector<double>* offline_latency_out) {
    const OfflineSolution offline = solve_offline_static(instance.catalog, trace.slots);
    std::vector<double> offline_latency;
    offline_latency.reserve(trace.slots.size());
    for (const SlotArrivals& slot : trace.slots) {
        offline_latency.push_back(service_routing(instance, slot, offline.cache).objective);
    }

    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<PolicyRun> runs(policies.size());
    for (std::size_t begin = 0; begin < policies.size(); begin += workers) {
        const std::size_t end = std::min(policies.size(), begin + workers);
        std::vector<std::future<std::vector<SlotCost>>> pending;
        for (std::size_t i = begin; i < end; ++i) {
            pending.push_back(std::async(std::launch::async, run_one, policies[i], std::cref(instance),
                                         std::cref(trace), std::cref(options), std::cref(offline)));
        }
        for (std::size_t i = begin; i < end; ++i) {
            PolicyRun& run = runs[i];
            run.policy = policies[i];
            run.seed = options.seed;
            run.costs = pending[i - begin].get();
            run.regret = regret(run.costs, offline_latency);
        }
    }
    if (offline_latency_out) *offline_latency_out = std::move(offline_latency);
    return runs;
}

ScenarioResult run_scenario(const ExperimentConfig& config) {
    config.validate();
    ScenarioResult result;
    std::vector<std::vector<PolicyRun>> per_seed;
    for (std::uint64_t seed : config.seeds) {
        const Instance instance(make_catalog(config, seed),
                                std::make_shared<Mm1Latency>(config.phi), CostParams{config.beta});
        Trace trace;
        if (config.trace.empty()) {
            trace = generate_trace(config.workload(seed));
        } else {
            trace = read_trace(config.trace, config.n_services);
            if (trace.horizon() > config.horizon) trace.slots.resize(static_cast<std::size_t>(config.horizon));
        }
        for (const SlotArrivals& slot : trace.slots) validate_arrivals(slot, config.n_services);

        PolicyOptions options{config.effective_eta(), config.granularity, seed};
        std::vector<double> offline_latency;
        per_seed.push_back(run_policies(instance, trace, config.policies, options, &offline_latency));
        if (result.offline_latency.empty()) {
            result.offline = solve_offline_static(instance.catalog, trace.slots);
            result.offline_latency = std::move(offline_latency);
        }
    }
    // (policy, seed, t) order
    for (std::size_t p = 0; p < config.policies.size(); ++p) {
        for (auto& runs : per_seed) result.runs.push_back(std::move(runs[p]));
    }
    return result;
}

void write_costs_csv(const std::vector<PolicyRun>& runs, std::ostream& out) {
    out << "t,policy,latency_cost,install_cost,seed,expected_install_cost\n";
    for (const PolicyRun& run : runs) {
        const std::string name = policy_name(run.policy);
        for (std::size_t t = 0; t < run.costs.size(); ++t) {
            const SlotCost& c = run.costs[t];
            out << t + 1 << ',' << name << ',' << format_number(c.latency) << ','
                << format_number(c.install) << ',' << run.seed << ','
                << format_number(c.expected_install) << '\n';
        }
    }
}

void write_regret_csv(const std::vector<PolicyRun>& runs, std::ostream& out) {
    out << "t,policy,cum_regret,regret_per_slot,seed\n";
    for (const PolicyRun& run : runs) {
        const std::string name = policy_name(run.policy);
        for (std::size_t t = 0; t < run.regret.cumulative.size(); ++t) {
            out << t + 1 << ',' << name << ',' << format_number(run.regret.cumulative[t]) << ','
                << format_number(run.regret.per_slot[t]) << ',' << run.seed << '\n';
        }
    }
}

namespace {

void write_file(const std::filesystem::path& path, const std::vector<PolicyRun>& runs,
                void (*writer)(const std::vector<PolicyRun>&, std::ostream&)) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    writer(runs, out);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_summary_rows(std::ostream& out, const std::string& parameter, const std::string& value,
                        const std::vector<PolicyRun>& runs) {
    for (const PolicyRun& run : runs) {
        out << parameter << ',' << value << ',' << policy_name(run.policy) << ',' << run.seed << ','
            << format_number(run.average_latency()) << ',' << format_number(run.average_install())
            << ',' << format_number(run.average_total()) << ','
            << format_number(run.regret.cumulative.empty() ? 0.0 : run.regret.cumulative.back())
            << ',' << format_number(run.regret.per_slot.empty() ? 0.0 : run.regret.per_slot.back())
            << '\n';
    }
}

}  // namespace

void run_experiment(const ExperimentConfig& config) {
    config.validate();
    std::filesystem::create_directories(config.out_dir);
    std::ofstream summary(config.out_dir / "summary.csv");
    if (!summary) throw std::runtime_error("cannot write " + (config.out_dir / "summary.csv").string());
    summary << "sweep_param,sweep_value,policy,seed,avg_latency_cost,avg_install_cost,avg_total_cost,"
               "cum_regret,regret_per_slot\n";

    if (!config.sweep) {
        const ScenarioResult result = run_scenario(config);
        write_file(config.out_dir / "costs.csv", result.runs, write_costs_csv);
        write_file(config.out_dir / "regret.csv", result.runs, write_regret_csv);
        write_summary_rows(summary, "none", "", result.runs);
        return;
    }
    for (double value : config.sweep->values) {
        ExperimentConfig point = config;
        point.sweep.reset();
        const std::string label = format_number(value);
        apply_setting(point, config.sweep->parameter, label);
        point.out_dir = config.out_dir / (config.sweep->parameter + "=" + label);
        std::filesystem::create_directories(point.out_dir);
        const ScenarioResult result = run_scenario(point);
        write_file(point.out_dir / "costs.csv", result.runs, write_costs_csv);
        write_file(point.out_dir / "regret.csv", result.runs, write_regret_csv);
        write_summary_rows(summary, config.sweep->parameter, label, result.runs);
    }
    if (!summary) throw std::runtime_error("failed writing summary.csv");
}

}  // namespace edgecache
