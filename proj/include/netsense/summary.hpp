#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace netsense {

struct MetricLine {
    std::string metric;
    double value = 0.0;
    std::string unit;
    std::string explanation;
};

struct UseCaseImpact {
    std::string use_case;
    std::string text;
};

struct SummaryContext {
    bool geo_used = false;
    bool history_used = false;
    int peers_down = 0;
    int peers_up = 0;
};

struct InterpretationSummary {
    std::string overall_text;
    std::vector<MetricLine> per_metric;
    std::vector<UseCaseImpact> use_case_impacts;
    std::vector<std::string> recommendations;
    SummaryContext context;
    bool llm_used = false;
    std::optional<std::string> model_id;
    std::string disclaimer;
};

const char* summary_disclaimer();

nlohmann::json summary_to_json(const InterpretationSummary& summary);

std::string summary_to_text(const InterpretationSummary& summary);

} // namespace netsense
