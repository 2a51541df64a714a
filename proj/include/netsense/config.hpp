#pragma once

#include "netsense/fallback.hpp"
#include "netsense/geo.hpp"
#include "netsense/ingest.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace netsense {

struct LlmConfig {
    std::string base_url; // empty disables the LLM path
    std::string model = "local-default";
    double temperature = 0.2;
    int max_tokens = 1024;
    int timeout_ms = 30000;
};

struct RetrievalConfig {
    int window_hours = 1;
    int limit = 200;
    bool prefer_server_location = false;
};

struct PromptConfig {
    int budget_tokens = 3000;
    std::string template_path; // empty means the built-in asset
};

struct PipelineConfig {
    GeoOptions geo;
    LlmConfig llm;
    std::string kb_path; // empty means in-memory store
    RetrievalConfig retrieval;
    PromptConfig prompt;
    std::vector<UseCaseThresholds> thresholds = default_thresholds();
    int max_inflight_llm = 4;
    int utc_offset_minutes = 0;
    FieldMap field_map;
};

using EnvReader = std::function<const char*(const char*)>;

// File values first, environment overrides second, validation last.
// Throws Error{Errc::config_error} on any problem, including an llm.api_key
// key in the file: the credential may only come from the environment.
PipelineConfig load_config(const std::optional<std::string>& path, const EnvReader& env = {});

// Read from NETSENSE_LLM_API_KEY; deliberately not part of PipelineConfig so
// the secret cannot ride along into dumps or logs.
std::optional<std::string> llm_credential(const EnvReader& env = {});

std::string default_template_path();

} // namespace netsense
