#include "netsense/config.hpp"

#include "netsense/errors.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <set>

#ifndef NETSENSE_ASSET_DIR
#define NETSENSE_ASSET_DIR "assets"
#endif

namespace netsense {

namespace {

using nlohmann::json;

const char* sys_getenv(const char* name) { return std::getenv(name); }

[[noreturn]] void bad(const std::string& message) { fail(Errc::config_error, message); }

void read_string(const json& obj, const char* key, std::string& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_string()) bad(std::string("'") + key + "' must be text");
    out = it->get<std::string>();
}

void read_int(const json& obj, const char* key, int& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_number_integer()) bad(std::string("'") + key + "' must be an integer");
    out = it->get<int>();
}

void read_int64(const json& obj, const char* key, std::int64_t& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_number_integer()) bad(std::string("'") + key + "' must be an integer");
    out = it->get<std::int64_t>();
}

void read_double(const json& obj, const char* key, double& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_number()) bad(std::string("'") + key + "' must be numeric");
    out = it->get<double>();
}

void read_bool(const json& obj, const char* key, bool& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_boolean()) bad(std::string("'") + key + "' must be a boolean");
    out = it->get<bool>();
}

std::optional<UseCase> use_case_from_name(const std::string& name) {
    if (name == "gaming") return UseCase::gaming;
    if (name == "video_streaming") return UseCase::video_streaming;
    if (name == "browsing") return UseCase::browsing;
    return std::nullopt;
}

void apply_file(PipelineConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("configuration file '" + path + "' is not readable");
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        bad("configuration file '" + path + "' is not a structured document");
    }

    if (doc.contains("geo")) {
        const json& geo = doc["geo"];
        if (!geo.is_object()) bad("'geo' must be a section");
        read_string(geo, "base_url", cfg.geo.base_url);
        read_int(geo, "timeout_ms", cfg.geo.timeout_ms);
        read_int64(geo, "ttl_seconds", cfg.geo.ttl_seconds);
        read_bool(geo, "include_coords", cfg.geo.include_coords);
    }
    if (doc.contains("llm")) {
        const json& llm = doc["llm"];
        if (!llm.is_object()) bad("'llm' must be a section");
        if (llm.contains("api_key")) {
            bad("the credential belongs in the NETSENSE_LLM_API_KEY environment "
                "variable, never in the configuration file");
        }
        read_string(llm, "base_url", cfg.llm.base_url);
        read_string(llm, "model", cfg.llm.model);
        read_double(llm, "temperature", cfg.llm.temperature);
        read_int(llm, "max_tokens", cfg.llm.max_tokens);
        read_int(llm, "timeout_ms", cfg.llm.timeout_ms);
    }
    if (doc.contains("kb")) {
        const json& kb = doc["kb"];
        if (!kb.is_object()) bad("'kb' must be a section");
        read_string(kb, "path", cfg.kb_path);
    }
    if (doc.contains("retrieval")) {
        const json& retrieval = doc["retrieval"];
        if (!retrieval.is_object()) bad("'retrieval' must be a section");
        read_int(retrieval, "window_hours", cfg.retrieval.window_hours);
        read_int(retrieval, "limit", cfg.retrieval.limit);
        read_bool(retrieval, "prefer_server_location", cfg.retrieval.prefer_server_location);
    }
    if (doc.contains("prompt")) {
        const json& prompt = doc["prompt"];
        if (!prompt.is_object()) bad("'prompt' must be a section");
        read_int(prompt, "budget_tokens", cfg.prompt.budget_tokens);
        read_string(prompt, "template_path", cfg.prompt.template_path);
    }
    if (doc.contains("thresholds")) {
        const json& thresholds = doc["thresholds"];
        if (!thresholds.is_array()) bad("'thresholds' must be a list");
        std::vector<UseCaseThresholds> parsed;
        for (const json& entry : thresholds) {
            if (!entry.is_object()) bad("each threshold entry must be a section");
            std::string name;
            read_string(entry, "use_case", name);
            auto uc = use_case_from_name(name);
            if (!uc) bad("unknown use case '" + name + "'");
            UseCaseThresholds t;
            t.use_case = *uc;
            read_double(entry, "min_download_mbps", t.min_download_mbps);
            read_double(entry, "min_upload_mbps", t.min_upload_mbps);
            read_double(entry, "max_latency_ms", t.max_latency_ms);
            read_double(entry, "max_loss_pct", t.max_loss_pct);
            parsed.push_back(t);
        }
        cfg.thresholds = std::move(parsed);
    }
    read_int(doc, "max_inflight_llm", cfg.max_inflight_llm);
    read_int(doc, "utc_offset_minutes", cfg.utc_offset_minutes);
    if (doc.contains("ingest")) {
        const json& ingest = doc["ingest"];
        if (!ingest.is_object()) bad("'ingest' must be a section");
        if (ingest.contains("field_map")) {
            const json& fm = ingest["field_map"];
            if (!fm.is_object()) bad("'ingest.field_map' must be a section");
            read_string(fm, "download_bandwidth", cfg.field_map.download_bandwidth);
            read_string(fm, "upload_bandwidth", cfg.field_map.upload_bandwidth);
            read_string(fm, "latency_idle", cfg.field_map.latency_idle);
            read_string(fm, "jitter", cfg.field_map.jitter);
            read_string(fm, "latency_dl_loaded", cfg.field_map.latency_dl_loaded);
            read_string(fm, "latency_ul_loaded", cfg.field_map.latency_ul_loaded);
            read_string(fm, "packet_loss", cfg.field_map.packet_loss);
            read_string(fm, "isp", cfg.field_map.isp);
            read_string(fm, "timestamp", cfg.field_map.timestamp);
            read_string(fm, "test_id", cfg.field_map.test_id);
            read_string(fm, "result_url", cfg.field_map.result_url);
            read_string(fm, "server_id", cfg.field_map.server_id);
            read_string(fm, "server_host", cfg.field_map.server_host);
            read_string(fm, "server_port", cfg.field_map.server_port);
            read_string(fm, "server_name", cfg.field_map.server_name);
            read_string(fm, "server_city", cfg.field_map.server_city);
            read_string(fm, "server_country", cfg.field_map.server_country);
            read_string(fm, "server_ip", cfg.field_map.server_ip);
            read_string(fm, "iface_internal_ip", cfg.field_map.iface_internal_ip);
            read_string(fm, "iface_external_ip", cfg.field_map.iface_external_ip);
            read_string(fm, "iface_mac", cfg.field_map.iface_mac);
            read_string(fm, "iface_name", cfg.field_map.iface_name);
            read_string(fm, "iface_is_vpn", cfg.field_map.iface_is_vpn);
            read_string(fm, "bandwidth_unit", cfg.field_map.bandwidth_unit);
        }
    }
}

void env_string(const EnvReader& env, const char* name, std::string& out) {
    if (const char* v = env(name)) out = v;
}

void env_int(const EnvReader& env, const char* name, int& out) {
    if (const char* v = env(name)) {
        try {
            out = std::stoi(v);
        } catch (const std::exception&) {
            bad(std::string(name) + " must be an integer");
        }
    }
}

void env_int64(const EnvReader& env, const char* name, std::int64_t& out) {
    if (const char* v = env(name)) {
        try {
            out = std::stoll(v);
        } catch (const std::exception&) {
            bad(std::string(name) + " must be an integer");
        }
    }
}

void env_double(const EnvReader& env, const char* name, double& out) {
    if (const char* v = env(name)) {
        try {
            out = std::stod(v);
        } catch (const std::exception&) {
            bad(std::string(name) + " must be numeric");
        }
    }
}

void env_bool(const EnvReader& env, const char* name, bool& out) {
    if (const char* v = env(name)) {
        std::string s = v;
        if (s == "1" || s == "true" || s == "yes") out = true;
        else if (s == "0" || s == "false" || s == "no") out = false;
        else bad(std::string(name) + " must be a boolean");
    }
}

void apply_env(PipelineConfig& cfg, const EnvReader& env) {
    env_string(env, "NETSENSE_GEO_BASE_URL", cfg.geo.base_url);
    env_int(env, "NETSENSE_GEO_TIMEOUT_MS", cfg.geo.timeout_ms);
    env_int64(env, "NETSENSE_GEO_TTL_SECONDS", cfg.geo.ttl_seconds);
    env_bool(env, "NETSENSE_GEO_INCLUDE_COORDS", cfg.geo.include_coords);
    env_string(env, "NETSENSE_LLM_BASE_URL", cfg.llm.base_url);
    env_string(env, "NETSENSE_LLM_MODEL", cfg.llm.model);
    env_double(env, "NETSENSE_LLM_TEMPERATURE", cfg.llm.temperature);
    env_int(env, "NETSENSE_LLM_MAX_TOKENS", cfg.llm.max_tokens);
    env_int(env, "NETSENSE_LLM_TIMEOUT_MS", cfg.llm.timeout_ms);
    env_string(env, "NETSENSE_KB_PATH", cfg.kb_path);
    env_int(env, "NETSENSE_RETRIEVAL_WINDOW_HOURS", cfg.retrieval.window_hours);
    env_int(env, "NETSENSE_RETRIEVAL_LIMIT", cfg.retrieval.limit);
    env_bool(env, "NETSENSE_PREFER_SERVER_LOCATION", cfg.retrieval.prefer_server_location);
    env_int(env, "NETSENSE_PROMPT_BUDGET_TOKENS", cfg.prompt.budget_tokens);
    env_string(env, "NETSENSE_PROMPT_TEMPLATE_PATH", cfg.prompt.template_path);
    env_int(env, "NETSENSE_MAX_INFLIGHT_LLM", cfg.max_inflight_llm);
    env_int(env, "NETSENSE_UTC_OFFSET_MINUTES", cfg.utc_offset_minutes);
}

void validate(const PipelineConfig& cfg) {
    if (cfg.geo.timeout_ms <= 0) bad("geo.timeout_ms must be positive");
    if (cfg.geo.ttl_seconds <= 0) bad("geo.ttl_seconds must be positive");
    if (cfg.llm.temperature < 0.0 || cfg.llm.temperature > 2.0) {
        bad("llm.temperature must lie within [0, 2]");
    }
    if (cfg.llm.max_tokens <= 0) bad("llm.max_tokens must be positive");
    if (cfg.llm.timeout_ms <= 0) bad("llm.timeout_ms must be positive");
    if (cfg.retrieval.window_hours < 0) bad("retrieval.window_hours must be non-negative");
    if (cfg.retrieval.limit <= 0 || cfg.retrieval.limit > kMaxRetrievalLimit) {
        bad("retrieval.limit must lie within [1, " + std::to_string(kMaxRetrievalLimit) + "]");
    }
    if (cfg.prompt.budget_tokens <= 0) bad("prompt.budget_tokens must be positive");
    if (cfg.max_inflight_llm < 1) bad("max_inflight_llm must be at least 1");
    if (cfg.utc_offset_minutes < -720 || cfg.utc_offset_minutes > 840) {
        bad("utc_offset_minutes must lie within [-720, 840]");
    }
    std::set<UseCase> seen;
    for (const auto& t : cfg.thresholds) {
        if (!std::isfinite(t.min_download_mbps) || t.min_download_mbps < 0.0 ||
            !std::isfinite(t.min_upload_mbps) || t.min_upload_mbps < 0.0 ||
            !std::isfinite(t.max_latency_ms) || t.max_latency_ms < 0.0 ||
            !std::isfinite(t.max_loss_pct) || t.max_loss_pct < 0.0) {
            bad("threshold bounds must be finite and non-negative");
        }
        if (!seen.insert(t.use_case).second) {
            bad(std::string("duplicate threshold entry for use case '") +
                use_case_name(t.use_case) + "'");
        }
    }
}

} // namespace

PipelineConfig load_config(const std::optional<std::string>& path, const EnvReader& env) {
    PipelineConfig cfg;
    EnvReader reader = env ? env : EnvReader(sys_getenv);
    if (path) apply_file(cfg, *path);
    apply_env(cfg, reader);
    validate(cfg);
    return cfg;
}

std::optional<std::string> llm_credential(const EnvReader& env) {
    EnvReader reader = env ? env : EnvReader(sys_getenv);
    const char* v = reader("NETSENSE_LLM_API_KEY");
    if (!v || *v == '\0') return std::nullopt;
    return std::string(v);
}

std::string default_template_path() {
    return std::string(NETSENSE_ASSET_DIR) + "/prompt_system.txt";
}

} // namespace netsense
