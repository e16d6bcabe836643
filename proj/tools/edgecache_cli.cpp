// edgecache: trace-driven runner for online service caching and routing.
//
//   edgecache run [--config FILE] [--phi ..] [--z ..] ... [--set key=value]...
//   edgecache gen-trace --out trace.csv [--config FILE] [--n ..] [--t ..] [--seed ..]
//   edgecache validate [--seed ..] [--scale ..]
//
// Exit codes: 0 ok, 1 usage or validation failure, 2 runtime error.

#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "edgecache/experiment.hpp"
#include "edgecache/validation.hpp"
#include "edgecache/workload.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct Overrides {
    std::string config;
    std::vector<std::pair<std::string, std::optional<std::string>*>> flags;
    std::optional<std::string> phi, z, beta, eta, k, t, seed, policies, trace, out, sweep;
    std::optional<std::string> n, zipf, requests, shuffle_period, shuffle_fraction, sample_counts;
    std::vector<std::string> settings;

    edgecache::ExperimentConfig build() const {
        edgecache::ExperimentConfig config;
        if (!config_path().empty()) config = edgecache::load_config(config_path());
        for (const auto& [key, value] : flags) {
            if (*value) edgecache::apply_setting(config, key, **value);
        }
        for (const std::string& kv : settings) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw edgecache::ConfigError(kv, "--set expects key=value");
            edgecache::apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
        }
        return config;
    }

    const std::string& config_path() const { return config; }
};

void add_option(CLI::App* cmd, Overrides& o, const std::string& flag, const std::string& key,
                std::optional<std::string>& slot, const std::string& help) {
    cmd->add_option(flag, slot, help);
    o.flags.emplace_back(key, &slot);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online service caching and routing at an edge server"};
    app.require_subcommand(1);

    Overrides run_opts;
    CLI::App* run = app.add_subcommand("run", "Run policies on a synthetic workload or trace and write CSVs");
    run->add_option("--config", run_opts.config, "key=value config file")->check(CLI::ExistingFile);
    add_option(run, run_opts, "--phi", "phi", run_opts.phi, "M/M/1 service rate");
    add_option(run, run_opts, "--z", "z", run_opts.z, "cache capacity Z");
    add_option(run, run_opts, "--beta", "beta", run_opts.beta, "installation cost per service");
    add_option(run, run_opts, "--eta", "eta", run_opts.eta, "step size");
    add_option(run, run_opts, "--k", "k", run_opts.k, "number of ROCR sample paths");
    add_option(run, run_opts, "--t", "t", run_opts.t, "horizon in slots");
    add_option(run, run_opts, "--seed", "seeds", run_opts.seed, "seed or comma-separated seeds");
    add_option(run, run_opts, "--policies", "policies", run_opts.policies, "e.g. OCR,ROCR,OGA,OFF");
    add_option(run, run_opts, "--trace", "trace", run_opts.trace, "trace file (t,service,lambda)");
    add_option(run, run_opts, "--out", "out", run_opts.out, "output directory");
    add_option(run, run_opts, "--sweep", "sweep", run_opts.sweep, "param:v1,v2,... (phi, z, beta, eta, k)");
    run->add_option("--set", run_opts.settings, "extra key=value settings");

    Overrides gen_opts;
    std::string trace_out;
    CLI::App* gen = app.add_subcommand("gen-trace", "Write a synthetic Zipf workload as a trace file");
    gen->add_option("--config", gen_opts.config, "key=value config file")->check(CLI::ExistingFile);
    gen->add_option("--out", trace_out, "trace file to write")->required();
    add_option(gen, gen_opts, "--n", "n_services", gen_opts.n, "number of services");
    add_option(gen, gen_opts, "--t", "t", gen_opts.t, "horizon in slots");
    add_option(gen, gen_opts, "--seed", "seeds", gen_opts.seed, "seed (first one is used)");
    add_option(gen, gen_opts, "--zipf", "zipf_exponent", gen_opts.zipf, "Zipf exponent");
    add_option(gen, gen_opts, "--requests", "requests_per_slot", gen_opts.requests, "requests per slot (W)");
    add_option(gen, gen_opts, "--shuffle-period", "shuffle_period", gen_opts.shuffle_period, "slots between rank shuffles");
    add_option(gen, gen_opts, "--shuffle-fraction", "shuffle_fraction", gen_opts.shuffle_fraction, "fraction of ranks shuffled");
    add_option(gen, gen_opts, "--sample-counts", "sample_counts", gen_opts.sample_counts, "true for integer counts");
    gen->add_option("--set", gen_opts.settings, "extra key=value settings");

    std::uint64_t validate_seed = 1;
    int validate_scale = 1;
    CLI::App* validate = app.add_subcommand("validate", "Run the invariant suites on random instances");
    validate->add_option("--seed", validate_seed, "random seed");
    validate->add_option("--scale", validate_scale, "multiplier on instance counts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*run) {
            const edgecache::ExperimentConfig config = run_opts.build();
            edgecache::run_experiment(config);
            std::cout << "wrote results to " << config.out_dir.string() << '\n';
        } else if (*gen) {
            const edgecache::ExperimentConfig config = gen_opts.build();
            config.validate();
            const edgecache::Trace trace = edgecache::generate_trace(config.workload(config.seeds.front()));
            edgecache::write_trace(trace, trace_out);
            std::cout << "wrote " << trace.horizon() << " slots to " << trace_out << '\n';
        } else if (*validate) {
            const edgecache::ValidationReport report = edgecache::run_validation(validate_seed, validate_scale);
            report.print(std::cout);
            return report.passed() ? 0 : kExitValidation;
        }
    } catch (const edgecache::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
