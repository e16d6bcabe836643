#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgecache/policies.hpp"
#include "edgecache/workload.hpp"

namespace edgecache {

class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& field, const std::string& what);
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

enum class EtaSchedule { Constant, InverseSqrtHorizon };

struct SweepSpec {
    std::string parameter;  // one of phi, z, beta, eta, k
    std::vector<double> values;
};

struct ExperimentConfig {
    // catalog
    std::size_t n_services = 1000;
    int capacity = 6;
    double d_min = 2.0;
    double d_max = 4.0;
    // latency and costs
    double phi = 60.0;
    double beta = 100.0;
    // policies
    std::vector<PolicyKind> policies{PolicyKind::Ocr, PolicyKind::Rocr, PolicyKind::Oga,
                                     PolicyKind::Offline};
    double eta = 0.05;
    EtaSchedule eta_schedule = EtaSchedule::Constant;  // InverseSqrtHorizon: eta / sqrt(T)
    int granularity = 100;
    int horizon = 10000;
    // workload; an empty trace path selects the synthetic generator
    double zipf_exponent = 0.8;
    double requests_per_slot = 100.0;
    int shuffle_period = 50;
    double shuffle_fraction = 0.2;
    bool sample_counts = false;
    std::filesystem::path trace;
    std::vector<std::uint64_t> seeds{1};
    std::filesystem::path out_dir = "results";
    std::optional<SweepSpec> sweep;

    void validate() const;
    double effective_eta() const;
    WorkloadSpec workload(std::uint64_t seed) const;
};

/// Applies one key=value setting. Throws ConfigError naming the key.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Flat key=value text; '#' starts a comment.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Catalog with d_n drawn uniformly from [d_min, d_max].
ServiceCatalog make_catalog(const ExperimentConfig& config, std::uint64_t seed);

struct PolicyRun {
    PolicyKind policy = PolicyKind::Offline;
    std::uint64_t seed = 0;
    std::vector<SlotCost> costs;
    RegretSeries regret;

    double average_latency() const;
    double average_install() const;
    double average_total() const;
};

struct ScenarioResult {
    OfflineSolution offline;
    std::vector<double> offline_latency;
    std::vector<PolicyRun> runs;  // ordered by (policy, seed)
};

/// Runs every configured policy on one materialized trace. The offline
/// solution is computed from the whole trace first.
std::vector<PolicyRun> run_policies(const Instance& instance, const Trace& trace,
                                    const std::vector<PolicyKind>& policies,
                                    const PolicyOptions& options,
                                    std::vector<double>* offline_latency = nullptr);

/// Runs all seeds of one configuration (no sweep) in parallel.
ScenarioResult run_scenario(const ExperimentConfig& config);

/// Runs the experiment and writes costs.csv, regret.csv and summary.csv to
/// config.out_dir; sweeps write one subdirectory per swept value.
void run_experiment(const ExperimentConfig& config);

void write_costs_csv(const std::vector<PolicyRun>& runs, std::ostream& out);
void write_regret_csv(const std::vector<PolicyRun>& runs, std::ostream& out);

}  // namespace edgecache
