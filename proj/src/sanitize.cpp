#include "netsense/sanitize.hpp"

#include "netsense/clock.hpp"
#include "netsense/errors.hpp"
#include "netsense/patterns.hpp"

#include <json.hpp>

namespace netsense {

namespace {

using nlohmann::json;

RedactionKind kind_from_pattern(PatternKind kind) {
    switch (kind) {
    case PatternKind::ipv4: return RedactionKind::ipv4;
    case PatternKind::ipv6: return RedactionKind::ipv6;
    case PatternKind::mac: return RedactionKind::mac;
    case PatternKind::url: return RedactionKind::url;
    case PatternKind::opaque_id: return RedactionKind::opaque_id;
    }
    return RedactionKind::field_drop;
}

RedactionKind ip_field_kind(const std::string& value) {
    if (is_ipv4_literal(value)) return RedactionKind::ipv4;
    if (is_ipv6_literal(value)) return RedactionKind::ipv6;
    return RedactionKind::field_drop;
}

} // namespace

const char* redaction_kind_name(RedactionKind kind) {
    switch (kind) {
    case RedactionKind::ipv4: return "ipv4";
    case RedactionKind::ipv6: return "ipv6";
    case RedactionKind::mac: return "mac";
    case RedactionKind::url: return "url";
    case RedactionKind::opaque_id: return "opaque_id";
    case RedactionKind::timestamp: return "timestamp";
    case RedactionKind::field_drop: return "field_drop";
    }
    return "unknown";
}

const char* redaction_action_name(RedactionAction action) {
    return action == RedactionAction::remove_field ? "remove_field" : "replace_token";
}

std::vector<RedactionRule> default_redaction_rules() {
    using K = RedactionKind;
    using A = RedactionAction;
    return {
        {K::timestamp, "timestamp_utc", A::remove_field},
        {K::opaque_id, "test_id", A::remove_field},
        {K::url, "result_url", A::remove_field},
        {K::opaque_id, "server.id", A::remove_field},
        {K::field_drop, "server.host", A::remove_field},
        {K::field_drop, "server.port", A::remove_field},
        {K::field_drop, "server.name", A::remove_field},
        {K::ipv4, "server.ip", A::remove_field},
        {K::ipv4, "interface.internal_ip", A::remove_field},
        {K::ipv4, "interface.external_ip", A::remove_field},
        {K::mac, "interface.mac_addr", A::remove_field},
        {K::field_drop, "interface.name", A::remove_field},
        {K::field_drop, "interface.is_vpn", A::remove_field},
        {K::field_drop, "raw", A::remove_field},
        {K::ipv4, "*", A::replace_token},
        {K::ipv6, "*", A::replace_token},
        {K::mac, "*", A::replace_token},
        {K::url, "*", A::replace_token},
        {K::opaque_id, "*", A::replace_token},
    };
}

int extract_time_of_day(const MeasurementReport& report, int utc_offset_minutes) {
    if (utc_offset_minutes < -720 || utc_offset_minutes > 840) {
        fail(Errc::invalid_offset, "utc offset must lie within [-720, +840] minutes");
    }
    return utc_hour(report.timestamp_utc + static_cast<std::int64_t>(utc_offset_minutes) * 60);
}

std::pair<std::string, std::vector<RedactionEntry>> scrub_text(const std::string& text,
                                                               const std::string& path) {
    std::string current = text;
    std::vector<RedactionEntry> entries;
    // Replacements can expose new matches at the seams, so rescan to fixpoint.
    // Placeholders contain no pattern characters, which guarantees progress.
    for (;;) {
        auto matches = find_pattern_matches(current);
        if (matches.empty()) break;
        for (auto it = matches.rbegin(); it != matches.rend(); ++it) {
            std::string placeholder =
                std::string("[REDACTED:") + pattern_kind_name(it->kind) + "]";
            current.replace(it->pos, it->len, placeholder);
        }
        for (const auto& m : matches) {
            entries.push_back({path, kind_from_pattern(m.kind), RedactionAction::replace_token});
        }
    }
    return {current, entries};
}

SanitizedReport sanitize_report(const MeasurementReport& report,
                                const std::vector<RedactionRule>& rules,
                                int utc_offset_minutes) {
    SanitizedReport out;
    out.time_of_day_hour = extract_time_of_day(report, utc_offset_minutes);

    out.metrics.download_mbps = report.download_mbps;
    out.metrics.upload_mbps = report.upload_mbps;
    out.metrics.latency_idle_ms = report.latency_idle_ms;
    out.metrics.jitter_ms = report.jitter_ms;
    out.metrics.latency_dl_loaded_ms = report.latency_dl_loaded_ms;
    out.metrics.latency_ul_loaded_ms = report.latency_ul_loaded_ms;
    out.metrics.packet_loss_pct = report.packet_loss_pct;

    // The configured kind is a fallback; fields that carry addresses are
    // classified from their content so the ledger names what was removed.
    auto rule_kind = [&rules](const std::string& path, RedactionKind dflt) {
        for (const auto& r : rules) {
            if (r.action == RedactionAction::remove_field && r.target == path) return r.kind;
        }
        return dflt;
    };
    auto drop = [&](const std::string& path, RedactionKind kind) {
        out.ledger.push_back({path, kind, RedactionAction::remove_field});
    };

    drop("timestamp_utc", rule_kind("timestamp_utc", RedactionKind::timestamp));
    if (report.test_id) drop("test_id", rule_kind("test_id", RedactionKind::opaque_id));
    if (report.result_url) drop("result_url", rule_kind("result_url", RedactionKind::url));
    if (report.server.id) drop("server.id", rule_kind("server.id", RedactionKind::opaque_id));
    if (report.server.host) drop("server.host", RedactionKind::field_drop);
    if (report.server.port) drop("server.port", RedactionKind::field_drop);
    if (report.server.name) drop("server.name", RedactionKind::field_drop);
    if (report.server.ip) drop("server.ip", ip_field_kind(*report.server.ip));
    if (report.client_interface.internal_ip) {
        drop("interface.internal_ip", ip_field_kind(*report.client_interface.internal_ip));
    }
    if (report.client_interface.external_ip) {
        drop("interface.external_ip", ip_field_kind(*report.client_interface.external_ip));
    }
    if (report.client_interface.mac_addr) drop("interface.mac_addr", RedactionKind::mac);
    if (report.client_interface.name) drop("interface.name", RedactionKind::field_drop);
    if (report.client_interface.is_vpn) drop("interface.is_vpn", RedactionKind::field_drop);
    if (!report.raw.empty()) drop("raw", RedactionKind::field_drop);

    auto keep_scrubbed = [&](const std::optional<std::string>& value, const std::string& path)
        -> std::optional<std::string> {
        if (!value) return std::nullopt;
        auto [clean, entries] = scrub_text(*value, path);
        out.ledger.insert(out.ledger.end(), entries.begin(), entries.end());
        return clean;
    };
    out.server_city = keep_scrubbed(report.server.city, "server.city");
    out.server_country = keep_scrubbed(report.server.country, "server.country");
    out.isp_name = keep_scrubbed(report.isp_name, "isp_name");

    return out;
}

nlohmann::json sanitized_to_json(const SanitizedReport& report) {
    json metrics;
    metrics["download_mbps"] = report.metrics.download_mbps;
    metrics["upload_mbps"] = report.metrics.upload_mbps;
    metrics["latency_idle_ms"] = report.metrics.latency_idle_ms;
    if (report.metrics.jitter_ms) metrics["jitter_ms"] = *report.metrics.jitter_ms;
    if (report.metrics.latency_dl_loaded_ms) {
        metrics["latency_dl_loaded_ms"] = *report.metrics.latency_dl_loaded_ms;
    }
    if (report.metrics.latency_ul_loaded_ms) {
        metrics["latency_ul_loaded_ms"] = *report.metrics.latency_ul_loaded_ms;
    }
    if (report.metrics.packet_loss_pct) {
        metrics["packet_loss_pct"] = *report.metrics.packet_loss_pct;
    }

    json ledger = json::array();
    for (const auto& e : report.ledger) {
        ledger.push_back({{"path", e.path},
                          {"kind", redaction_kind_name(e.kind)},
                          {"action", redaction_action_name(e.action)}});
    }

    json doc;
    doc["metrics"] = metrics;
    if (report.server_city) doc["server_city"] = *report.server_city;
    if (report.server_country) doc["server_country"] = *report.server_country;
    if (report.isp_name) doc["isp_name"] = *report.isp_name;
    doc["time_of_day_hour"] = report.time_of_day_hour;
    doc["ledger"] = ledger;
    return doc;
}

} // namespace netsense
