#include "doctest.h"
#include "edgehealth/cli/commands.hpp"
#include "edgehealth/cli/config.hpp"
#include "edgehealth/cli/verify.hpp"
#include "json.hpp"

using namespace edgehealth;
using namespace edgehealth::cli;
using json = nlohmann::ordered_json;

namespace {

std::string error_path(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "<accepted>";
}

std::string with(const std::function<void(json&)>& edit) {
    json doc = json::parse(default_config_json());
    edit(doc);
    return doc.dump();
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("default config round trips") {
        std::string text = default_config_json();
        AppConfig c = parse_config(text);
        CHECK(c.scenario.network.hospitals == 4);
        CHECK(c.sweep.sizes_kb == std::vector<double>{200, 400, 600, 800, 1000});
        CHECK(json::parse(text) == json::parse(with([](json&) {})));
        CHECK(parse_config(R"({"schema_version": 1})").scenario.seed == c.scenario.seed);
    }

    TEST_CASE("checked-in configs load") {
        for (const char* name : {"default.json", "bench.json"}) {
            CHECK_NOTHROW(load_config(std::string(EDGEHEALTH_SOURCE_DIR) + "/configs/" + name));
        }
        AppConfig bench = load_config(std::string(EDGEHEALTH_SOURCE_DIR) + "/configs/bench.json");
        CHECK(bench.scenario.network.fifo_queues);
        CHECK(bench.scenario.workload.record_min_bytes == bench.scenario.workload.record_max_bytes);
    }

    TEST_CASE("errors carry the offending path") {
        CHECK(error_path("{}") == "schema_version");
        CHECK(error_path(R"({"schema_version": 2})") == "schema_version");
        CHECK(error_path("{not json") == "");
        CHECK(error_path(with([](json& d) { d["topology"]["links"]["wan"]["bandwidth_bps"] = "fast"; })) ==
              "topology.links.wan.bandwidth_bps");
        CHECK(error_path(with([](json& d) { d["topology"]["links"]["wan"]["bandwidth_bps"] = 0; })) ==
              "topology.links.wan.bandwidth_bps");
        CHECK(error_path(with([](json& d) { d["topology"]["hopsitals"] = 3; })) == "topology.hopsitals");
        CHECK(error_path(with([](json& d) { d["consensus"]["validators"] = 5; })) == "consensus.validators");
        CHECK(error_path(with([](json& d) { d["workload"]["request_counts"][2] = -1; })) ==
              "workload.request_counts[2]");
        CHECK(error_path(with([](json& d) { d["task"]["file_kb"] = json::array({900, 100}); })) == "task.file_kb");
        CHECK(error_path(with([](json& d) { d["weights"]["time"] = 0.9; })) == "weights");
        CHECK(error_path(with([](json& d) { d["service"]["replication"] = "sometimes"; })) == "service.replication");
        CHECK(error_path(with([](json& d) { d["sweep"]["sizes_kb"] = json::array(); })) == "sweep.sizes_kb");
        CHECK(error_path(with([](json& d) { d["verify"]["oracle_devices"] = 21; })) == "verify.oracle_devices");
        CHECK(error_path(with([](json& d) { d["seed"] = 1.5; })) == "seed");
    }

    TEST_CASE("ranges accept a number or a pair") {
        AppConfig c = parse_config(with([](json& d) { d["task"]["file_kb"] = 300; }));
        CHECK(c.scenario.network.devices.file_kb.lo == 300);
        CHECK(c.scenario.network.devices.file_kb.hi == 300);
    }

    TEST_CASE("weights and modes parse from the command line") {
        auto w = parse_weights("1/6,2/3,1/6");
        CHECK(w.time == doctest::Approx(1.0 / 6));
        CHECK(w.energy == doctest::Approx(2.0 / 3));
        CHECK_THROWS_AS(parse_weights("0.5,0.5"), ConfigError);
        CHECK_THROWS_AS(parse_weights("a,b,c"), ConfigError);
        CHECK_THROWS_AS(parse_weights("0.5,0.5,0.5"), ConfigError);
        CHECK(parse_modes("dht,central-cloud") == std::vector{netsim::Mode::Dht, netsim::Mode::CentralCloud});
        CHECK_THROWS_WITH(parse_modes("dht,mesh"), doctest::Contains("mesh"));
    }

    TEST_CASE("offload sweep rows") {
        AppConfig c;
        c.sweep.sizes_kb = {200, 1000};
        c.sweep.devices = 4;
        c.sweep.repetitions = 2;
        auto rows = offload_sweep(c, default_weight_sets());
        REQUIRE(rows.size() == 2 * 2 * 3);
        CHECK(rows[0].scheme == "local");
        CHECK(rows[1].scheme == "cloud");
        CHECK(rows[2].scheme == "edge");
        for (std::size_t i = 0; i < rows.size(); i += 3) {
            CHECK(rows[i].offloaded == 0);
            CHECK(rows[i + 2].total_cost <= rows[i].total_cost);
        }
        std::string csv = sweep_csv(rows);
        CHECK(csv.rfind("size_kb,scheme,weight_time,weight_energy,weight_memory,", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
        CHECK(sweep_csv(offload_sweep(c, default_weight_sets())) == csv);
    }

    TEST_CASE("verify report format and tamper detection") {
        AppConfig c;
        c.verify.oracle_trials = 3;
        c.verify.oracle_devices = 5;
        c.verify.roundtrips = 3;
        c.verify.pbft_runs = 2;
        c.scenario.workload.record_min_bytes = 2000;
        c.scenario.workload.record_max_bytes = 4000;
        c.scenario.workload.request_counts = {2, 4};
        auto checks = run_verify(c);
        for (const auto& ch : checks) CHECK_MESSAGE(ch.passed, ch.name << ": " << ch.detail);
        std::string report = format_report(checks);
        CHECK(report.find("PASS oracle-equivalence") != std::string::npos);
        CHECK(report.find(std::to_string(checks.size()) + "/" + std::to_string(checks.size()) + " checks passed") !=
              std::string::npos);

        c.verify.inject_tamper = true;
        bool storage_failed = false;
        for (const auto& ch : run_verify(c)) {
            if (ch.name == "storage-integrity") storage_failed = !ch.passed;
        }
        CHECK(storage_failed);
    }
}
