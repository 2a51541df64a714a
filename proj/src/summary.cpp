#include "netsense/summary.hpp"

#include <cstdio>
#include <sstream>

namespace netsense {

const char* summary_disclaimer() {
    return "Automated guidance based on a single speed test from one device at one moment. "
           "It is not a professional network diagnosis.";
}

nlohmann::json summary_to_json(const InterpretationSummary& summary) {
    nlohmann::json doc;
    doc["overall_text"] = summary.overall_text;

    nlohmann::json metrics = nlohmann::json::array();
    for (const auto& m : summary.per_metric) {
        metrics.push_back({{"metric", m.metric},
                           {"value", m.value},
                           {"unit", m.unit},
                           {"explanation", m.explanation}});
    }
    doc["per_metric"] = metrics;

    nlohmann::json impacts = nlohmann::json::array();
    for (const auto& u : summary.use_case_impacts) {
        impacts.push_back({{"use_case", u.use_case}, {"text", u.text}});
    }
    doc["use_case_impacts"] = impacts;

    doc["recommendations"] = summary.recommendations;
    doc["context"] = {{"geo_used", summary.context.geo_used},
                      {"history_used", summary.context.history_used},
                      {"peers_down", summary.context.peers_down},
                      {"peers_up", summary.context.peers_up}};
    doc["llm_used"] = summary.llm_used;
    if (summary.model_id) doc["model_id"] = *summary.model_id;
    doc["disclaimer"] = summary.disclaimer;
    return doc;
}

std::string summary_to_text(const InterpretationSummary& summary) {
    std::ostringstream out;
    out << summary.overall_text << "\n";
    if (!summary.per_metric.empty()) {
        out << "\nMetrics\n";
        for (const auto& m : summary.per_metric) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.2f", m.value);
            out << "  - " << m.metric << " = " << buf << " " << m.unit << ". "
                << m.explanation << "\n";
        }
    }
    if (!summary.use_case_impacts.empty()) {
        out << "\nUse cases\n";
        for (const auto& u : summary.use_case_impacts) {
            out << "  - " << u.use_case << ": " << u.text << "\n";
        }
    }
    if (!summary.recommendations.empty()) {
        out << "\nRecommendations\n";
        for (const auto& r : summary.recommendations) out << "  - " << r << "\n";
    }
    out << "\n" << summary.disclaimer << "\n";
    return out.str();
}

} // namespace netsense
