// Command-line driver: offloading sweeps, sharing benchmarks, scenario runs
// and the property suite.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "edgehealth/cli/commands.hpp"
#include "edgehealth/cli/verify.hpp"

namespace fs = std::filesystem;
using namespace edgehealth;

namespace {

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
};

void add_common(CLI::App* cmd, Common& common, bool with_out) {
    cmd->add_option("--config", common.config_path, "JSON config file (built-in defaults when omitted)");
    cmd->add_option("--seed", common.seed, "Override the config seed");
    if (with_out) cmd->add_option("--out", common.out_dir, "Write CSV files into this directory instead of stdout");
}

cli::AppConfig load(const Common& common) {
    cli::AppConfig config = common.config_path.empty() ? cli::AppConfig{} : cli::load_config(common.config_path);
    if (common.seed) config.scenario.seed = *common.seed;
    return config;
}

void emit(const Common& common, const std::string& name, const std::string& csv) {
    if (common.out_dir.empty()) {
        std::cout << csv;
        return;
    }
    fs::create_directories(common.out_dir);
    fs::path path = fs::path(common.out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    out << csv;
    if (!out) throw std::runtime_error("cannot write " + path.string());
    std::cerr << "wrote " << path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edge health data offloading and sharing simulator"};
    app.require_subcommand(1);

    Common common;
    std::vector<std::string> weight_args;
    std::string modes_arg = "decentralized,dht,central-authority,central-cloud";
    std::string mode_arg = "decentralized";

    auto* sweep = app.add_subcommand("offload-sweep", "Offloading cost per file size for local, cloud and edge schemes");
    add_common(sweep, common, true);
    sweep->add_option("--weights", weight_args, "time,energy,memory weights; repeatable (default: both study settings)");

    auto* bench = app.add_subcommand("share-bench", "Latency, hops and acceptance per request count and architecture");
    add_common(bench, common, true);
    bench->add_option("--modes", modes_arg, "Comma-separated architectures");

    auto* scenario = app.add_subcommand("scenario", "One populated network and one request burst");
    add_common(scenario, common, true);
    scenario->add_option("--mode", mode_arg, "Architecture");

    auto* verify = app.add_subcommand("verify", "Run the property suite; exit 1 on any failure");
    add_common(verify, common, false);

    app.add_subcommand("print-config", "Print the built-in default config");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("print-config")) {
            std::cout << cli::default_config_json();
            return 0;
        }
        cli::AppConfig config = load(common);
        if (sweep->parsed()) {
            std::vector<offload::CostWeights> sets;
            for (const auto& w : weight_args) sets.push_back(cli::parse_weights(w));
            if (sets.empty()) sets = cli::default_weight_sets();
            emit(common, "offload_sweep.csv", cli::sweep_csv(cli::offload_sweep(config, sets)));
        } else if (bench->parsed()) {
            auto modes = cli::parse_modes(modes_arg);
            emit(common, "share_bench.csv", netsim::bench_csv(netsim::share_bench(config.scenario, modes)));
        } else if (scenario->parsed()) {
            auto modes = cli::parse_modes(mode_arg);
            if (modes.size() != 1) throw cli::ConfigError("mode", "expected exactly one mode");
            auto result = netsim::run_scenario(config.scenario, modes.front());
            if (common.out_dir.empty()) {
                std::cout << netsim::requests_csv(result);
            } else {
                emit(common, "offload.csv", netsim::offload_csv(result));
                emit(common, "storage.csv", netsim::storage_csv(result));
                emit(common, "requests.csv", netsim::requests_csv(result));
            }
        } else if (verify->parsed()) {
            auto checks = cli::run_verify(config);
            std::cout << cli::format_report(checks);
            for (const auto& c : checks) {
                if (!c.passed) return 1;
            }
        }
    } catch (const cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
