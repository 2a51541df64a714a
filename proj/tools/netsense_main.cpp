#include "netsense/config.hpp"
#include "netsense/errors.hpp"
#include "netsense/kb.hpp"
#include "netsense/pipeline.hpp"
#include "netsense/service.hpp"
#include "netsense/summary.hpp"

#include <CLI11.hpp>
#include <csignal>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <thread>

namespace {

using namespace netsense;

int exit_code_for(Errc code) {
    switch (code) {
    case Errc::config_error:
    case Errc::bind_failure:
        return 2;
    default:
        return 1;
    }
}

std::string read_input(const std::string& input) {
    if (input == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(input, std::ios::binary);
    if (!in) fail(Errc::file_not_found, "input file '" + input + "' is not readable");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ColumnMap column_map_from_file(const std::string& path) {
    ColumnMap map;
    std::ifstream in(path);
    if (!in) fail(Errc::file_not_found, "column map file '" + path + "' is not readable");
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        fail(Errc::config_error, "column map file '" + path + "' is not a structured document");
    }
    auto read = [&doc](const char* key, std::string& out) {
        auto it = doc.find(key);
        if (it == doc.end()) return;
        if (!it->is_string()) {
            fail(Errc::config_error, std::string("column map key '") + key + "' must be text");
        }
        out = it->get<std::string>();
    };
    read("unit_id", map.unit_id);
    read("timestamp", map.timestamp);
    read("throughput", map.throughput);
    read("fetch_time", map.fetch_time);
    read("throughput_unit", map.throughput_unit);
    read("fetch_time_unit", map.fetch_time_unit);
    return map;
}

std::shared_ptr<KbStorage> open_store(const PipelineConfig& cfg) {
    if (cfg.kb_path.empty()) {
        fail(Errc::config_error,
             "set kb.path in the configuration file or NETSENSE_KB_PATH to use the "
             "knowledge base commands");
    }
    return std::make_shared<FileStore>(cfg.kb_path);
}

Service* g_service = nullptr;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Turns raw speed-test results into plain-language interpretations"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "Configuration file (JSON)");

    auto* cmd_interpret = app.add_subcommand("interpret", "Interpret one result document");
    std::string input = "-";
    cmd_interpret->add_option("--input", input, "Result JSON path, or - for stdin");
    bool no_llm = false;
    cmd_interpret->add_flag("--no-llm", no_llm, "Skip the model and use the rules fallback");
    bool as_json = false, as_text = false;
    auto* json_flag = cmd_interpret->add_flag("--json", as_json, "Emit the summary as JSON");
    cmd_interpret->add_flag("--text", as_text, "Emit the summary as readable text (default)")
        ->excludes(json_flag);

    auto* cmd_kb = app.add_subcommand("kb", "Knowledge base maintenance");
    cmd_kb->require_subcommand(1);
    auto* cmd_ingest = cmd_kb->add_subcommand("ingest", "Ingest a measurement CSV");
    std::string csv_path;
    cmd_ingest->add_option("csv", csv_path, "Measurement CSV file")->required();
    std::string direction_text;
    cmd_ingest->add_option("--direction", direction_text, "down or up")
        ->required()
        ->check(CLI::IsMember({"down", "up"}));
    std::string column_map_path;
    cmd_ingest->add_option("--column-map", column_map_path, "Column map JSON file");
    std::string unit_locations_path;
    cmd_ingest->add_option("--unit-locations", unit_locations_path,
                           "unit_id to city/region/country CSV")
        ->required();
    std::string hour_policy_text = "map";
    cmd_ingest->add_option("--hour-policy", hour_policy_text, "map or utc")
        ->check(CLI::IsMember({"map", "utc"}));

    auto* cmd_stats = cmd_kb->add_subcommand("stats", "Show knowledge base counts");
    std::string location_key;
    cmd_stats->add_option("--location", location_key, "Normalized location key");

    auto* cmd_serve = app.add_subcommand("serve", "Run the HTTP service");
    std::string bind = "127.0.0.1:8080";
    cmd_serve->add_option("--bind", bind, "host:port to listen on");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        std::optional<std::string> cfg_path;
        if (!config_path.empty()) cfg_path = config_path;
        PipelineConfig cfg = load_config(cfg_path);

        if (cmd_interpret->parsed()) {
            std::string document = read_input(input);
            Pipeline pipeline = build_pipeline(cfg, !no_llm);
            InterpretationSummary summary = pipeline.interpret(document);
            if (as_json) {
                std::cout << summary_to_json(summary).dump(2) << "\n";
            } else {
                std::cout << summary_to_text(summary);
            }
            return 0;
        }

        if (cmd_ingest->parsed()) {
            auto store = open_store(cfg);
            ColumnMap map =
                column_map_path.empty() ? ColumnMap{} : column_map_from_file(column_map_path);
            UnitLocationMap units = load_unit_locations(unit_locations_path);
            Direction direction =
                direction_text == "down" ? Direction::download : Direction::upload;
            HourPolicy policy =
                hour_policy_text == "utc" ? HourPolicy::utc : HourPolicy::map_offset;
            IngestResult result = ingest_csv(*store, csv_path, map, direction, units, policy);
            std::cout << "ingested " << result.ingested << " rows, skipped " << result.skipped
                      << "\n";
            for (const auto& [reason, count] : result.skip_reasons) {
                std::cout << "  " << reason << ": " << count << "\n";
            }
            return 0;
        }

        if (cmd_stats->parsed()) {
            auto store = open_store(cfg);
            std::optional<std::string> key;
            if (!location_key.empty()) key = location_key;
            std::cout << "records: " << store->record_count(key) << "\n";
            return 0;
        }

        if (cmd_serve->parsed()) {
            auto [host, port] = parse_bind_address(bind);

            sigset_t signals;
            sigemptyset(&signals);
            sigaddset(&signals, SIGINT);
            sigaddset(&signals, SIGTERM);
            pthread_sigmask(SIG_BLOCK, &signals, nullptr);

            Pipeline pipeline = build_pipeline(cfg);
            Service service(std::move(pipeline));
            service.start(host, port);
            g_service = &service;
            std::cout << "listening on " << host << " port " << service.port() << std::endl;

            std::thread waiter([&signals] {
                int sig = 0;
                sigwait(&signals, &sig);
                if (g_service) g_service->stop();
            });
            service.wait();
            raise(SIGTERM); // unblock the waiter if the server ended on its own
            waiter.join();
            g_service = nullptr;
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
