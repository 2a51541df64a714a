#include "netsense/ingest.hpp"

#include "netsense/clock.hpp"
#include "netsense/errors.hpp"

#include <cmath>
#include <json.hpp>

namespace netsense {

namespace {

using nlohmann::json;

const json* find_path(const json& root, const std::string& dotted) {
    const json* node = &root;
    std::size_t start = 0;
    while (start <= dotted.size()) {
        std::size_t dot = dotted.find('.', start);
        std::string key = dotted.substr(start, dot == std::string::npos ? dot : dot - start);
        if (!node->is_object()) return nullptr;
        auto it = node->find(key);
        if (it == node->end() || it->is_null()) return nullptr;
        node = &*it;
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    return node;
}

std::optional<double> opt_number(const json& doc, const std::string& path) {
    const json* node = find_path(doc, path);
    if (!node) return std::nullopt;
    if (!node->is_number()) {
        fail(Errc::malformed_document, "field '" + path + "' is not numeric");
    }
    return node->get<double>();
}

double req_number(const json& doc, const std::string& path) {
    auto v = opt_number(doc, path);
    if (!v) fail(Errc::missing_required_field, "field '" + path + "' is absent");
    return *v;
}

std::optional<std::string> opt_text(const json& doc, const std::string& path) {
    const json* node = find_path(doc, path);
    if (!node) return std::nullopt;
    if (node->is_string()) return node->get<std::string>();
    if (node->is_number()) return node->dump();
    fail(Errc::malformed_document, "field '" + path + "' is not text");
}

std::optional<int> opt_int(const json& doc, const std::string& path) {
    const json* node = find_path(doc, path);
    if (!node) return std::nullopt;
    if (!node->is_number_integer()) {
        fail(Errc::malformed_document, "field '" + path + "' is not an integer");
    }
    return node->get<int>();
}

std::optional<bool> opt_bool(const json& doc, const std::string& path) {
    const json* node = find_path(doc, path);
    if (!node) return std::nullopt;
    if (!node->is_boolean()) {
        fail(Errc::malformed_document, "field '" + path + "' is not a boolean");
    }
    return node->get<bool>();
}

void check_min(double v, double lo, const std::string& field) {
    if (!std::isfinite(v) || v < lo) {
        fail(Errc::range_violation, "field '" + field + "' out of range");
    }
}

} // namespace

double convert_bandwidth(double bytes_per_second) {
    if (!std::isfinite(bytes_per_second) || bytes_per_second < 0.0) {
        fail(Errc::range_violation, "bandwidth must be finite and non-negative");
    }
    return bytes_per_second * 8.0 / 1e6;
}

MeasurementReport parse_result(const std::string& raw_document, const FieldMap& map) {
    json doc = json::parse(raw_document, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        fail(Errc::malformed_document, "input is not a structured object document");
    }

    MeasurementReport r;
    r.raw = raw_document;

    double down = req_number(doc, map.download_bandwidth);
    double up = req_number(doc, map.upload_bandwidth);
    if (map.bandwidth_unit == "mbps") {
        check_min(down, 0.0, map.download_bandwidth);
        check_min(up, 0.0, map.upload_bandwidth);
        r.download_mbps = down;
        r.upload_mbps = up;
    } else {
        r.download_mbps = convert_bandwidth(down);
        r.upload_mbps = convert_bandwidth(up);
    }

    r.latency_idle_ms = req_number(doc, map.latency_idle);
    check_min(r.latency_idle_ms, 0.0, map.latency_idle);

    r.jitter_ms = opt_number(doc, map.jitter);
    if (r.jitter_ms) check_min(*r.jitter_ms, 0.0, map.jitter);
    r.latency_dl_loaded_ms = opt_number(doc, map.latency_dl_loaded);
    if (r.latency_dl_loaded_ms) check_min(*r.latency_dl_loaded_ms, 0.0, map.latency_dl_loaded);
    r.latency_ul_loaded_ms = opt_number(doc, map.latency_ul_loaded);
    if (r.latency_ul_loaded_ms) check_min(*r.latency_ul_loaded_ms, 0.0, map.latency_ul_loaded);

    r.packet_loss_pct = opt_number(doc, map.packet_loss);
    if (r.packet_loss_pct &&
        (!std::isfinite(*r.packet_loss_pct) || *r.packet_loss_pct < 0.0 ||
         *r.packet_loss_pct > 100.0)) {
        fail(Errc::range_violation, "field '" + map.packet_loss + "' outside [0, 100]");
    }

    auto ts = opt_text(doc, map.timestamp);
    if (!ts) fail(Errc::missing_required_field, "field '" + map.timestamp + "' is absent");
    auto instant = parse_instant(*ts);
    if (!instant) {
        fail(Errc::malformed_document, "field '" + map.timestamp + "' is not a valid instant");
    }
    r.timestamp_utc = *instant;
    r.timestamp_text = *ts;

    r.isp_name = opt_text(doc, map.isp);
    r.test_id = opt_text(doc, map.test_id);
    r.result_url = opt_text(doc, map.result_url);

    r.server.id = opt_text(doc, map.server_id);
    r.server.host = opt_text(doc, map.server_host);
    r.server.port = opt_int(doc, map.server_port);
    if (r.server.port && (*r.server.port < 1 || *r.server.port > 65535)) {
        fail(Errc::range_violation, "field '" + map.server_port + "' outside [1, 65535]");
    }
    r.server.name = opt_text(doc, map.server_name);
    r.server.city = opt_text(doc, map.server_city);
    r.server.country = opt_text(doc, map.server_country);
    r.server.ip = opt_text(doc, map.server_ip);

    r.client_interface.internal_ip = opt_text(doc, map.iface_internal_ip);
    r.client_interface.external_ip = opt_text(doc, map.iface_external_ip);
    r.client_interface.mac_addr = opt_text(doc, map.iface_mac);
    r.client_interface.name = opt_text(doc, map.iface_name);
    r.client_interface.is_vpn = opt_bool(doc, map.iface_is_vpn);

    return r;
}

std::vector<ValidationFinding> validate_report(const MeasurementReport& report) {
    std::vector<ValidationFinding> findings;
    auto require = [&](bool ok, const std::string& field, const std::string& rule) {
        if (!ok) findings.push_back({field, rule});
    };

    require(std::isfinite(report.download_mbps) && report.download_mbps >= 0.0,
            "download_mbps", "must be finite and >= 0");
    require(std::isfinite(report.upload_mbps) && report.upload_mbps >= 0.0,
            "upload_mbps", "must be finite and >= 0");
    require(std::isfinite(report.latency_idle_ms) && report.latency_idle_ms >= 0.0,
            "latency_idle_ms", "must be finite and >= 0");
    if (report.jitter_ms) {
        require(std::isfinite(*report.jitter_ms) && *report.jitter_ms >= 0.0,
                "jitter_ms", "must be finite and >= 0");
    }
    if (report.latency_dl_loaded_ms) {
        require(std::isfinite(*report.latency_dl_loaded_ms) && *report.latency_dl_loaded_ms >= 0.0,
                "latency_dl_loaded_ms", "must be finite and >= 0");
    }
    if (report.latency_ul_loaded_ms) {
        require(std::isfinite(*report.latency_ul_loaded_ms) && *report.latency_ul_loaded_ms >= 0.0,
                "latency_ul_loaded_ms", "must be finite and >= 0");
    }
    if (report.packet_loss_pct) {
        require(std::isfinite(*report.packet_loss_pct) && *report.packet_loss_pct >= 0.0 &&
                    *report.packet_loss_pct <= 100.0,
                "packet_loss_pct", "must be within [0, 100]");
    }
    if (report.server.port) {
        require(*report.server.port >= 1 && *report.server.port <= 65535,
                "server.port", "must be within [1, 65535]");
    }
    if (!report.timestamp_text.empty()) {
        require(parse_instant(report.timestamp_text).has_value(),
                "timestamp_utc", "must parse to a valid instant");
    }
    return findings;
}

} // namespace netsense
