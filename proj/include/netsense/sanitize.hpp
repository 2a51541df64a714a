#pragma once

#include "netsense/measurement.hpp"

#include <json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace netsense {

enum class RedactionKind { ipv4, ipv6, mac, url, opaque_id, timestamp, field_drop };
enum class RedactionAction { remove_field, replace_token };

const char* redaction_kind_name(RedactionKind kind);
const char* redaction_action_name(RedactionAction action);

struct RedactionRule {
    RedactionKind kind;
    std::string target; // field path, or "*" for any text value
    RedactionAction action;
};

// What happened, never the value itself.
struct RedactionEntry {
    std::string path;
    RedactionKind kind;
    RedactionAction action;
};

struct Metrics {
    double download_mbps = 0.0;
    double upload_mbps = 0.0;
    double latency_idle_ms = 0.0;
    std::optional<double> jitter_ms;
    std::optional<double> latency_dl_loaded_ms;
    std::optional<double> latency_ul_loaded_ms;
    std::optional<double> packet_loss_pct;
};

struct SanitizedReport {
    Metrics metrics;
    std::optional<std::string> server_city;
    std::optional<std::string> server_country;
    std::optional<std::string> isp_name;
    int time_of_day_hour = 0;
    std::vector<RedactionEntry> ledger;
};

nlohmann::json sanitized_to_json(const SanitizedReport& report);

std::vector<RedactionRule> default_redaction_rules();

int extract_time_of_day(const MeasurementReport& report, int utc_offset_minutes);

std::pair<std::string, std::vector<RedactionEntry>> scrub_text(const std::string& text,
                                                               const std::string& path = "");

SanitizedReport sanitize_report(const MeasurementReport& report,
                                const std::vector<RedactionRule>& rules,
                                int utc_offset_minutes);

} // namespace netsense
