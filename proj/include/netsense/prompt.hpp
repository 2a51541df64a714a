#pragma once

#include "netsense/geo.hpp"
#include "netsense/sanitize.hpp"
#include "netsense/stats.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>

namespace netsense {

enum class PromptSection { metrics, geo, history_down, history_up };

const char* prompt_section_name(PromptSection section);

struct PromptBundle {
    std::string system_text;
    std::string user_text;
    int token_estimate = 0;
    std::set<PromptSection> sections_included;
};

// ceil(characters / 4): deterministic, model-agnostic budget proxy.
int estimate_tokens(const std::string& text);

std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& slots);

std::string load_text_asset(const std::string& path);

// The labeled-sections contract shared by the prompt and the output parser.
const char* output_format_block();

PromptBundle build_prompt(const SanitizedReport& report, const std::optional<GeoContext>& geo,
                          const std::optional<ContextStats>& stats_down,
                          const std::optional<ContextStats>& stats_up, int budget_tokens,
                          const std::string& system_template);

} // namespace netsense
