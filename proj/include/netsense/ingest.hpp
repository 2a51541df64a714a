#pragma once

#include "netsense/measurement.hpp"

#include <string>
#include <vector>

namespace netsense {

// Dotted paths into the source tool's result document. Defaults follow the
// Ookla CLI JSON layout; all of them can be overridden from configuration.
struct FieldMap {
    std::string download_bandwidth = "download.bandwidth";
    std::string upload_bandwidth = "upload.bandwidth";
    std::string latency_idle = "ping.latency";
    std::string jitter = "ping.jitter";
    std::string latency_dl_loaded = "download.latency.iqm";
    std::string latency_ul_loaded = "upload.latency.iqm";
    std::string packet_loss = "packetLoss";
    std::string isp = "isp";
    std::string timestamp = "timestamp";
    std::string test_id = "result.id";
    std::string result_url = "result.url";
    std::string server_id = "server.id";
    std::string server_host = "server.host";
    std::string server_port = "server.port";
    std::string server_name = "server.name";
    std::string server_city = "server.location";
    std::string server_country = "server.country";
    std::string server_ip = "server.ip";
    std::string iface_internal_ip = "interface.internalIp";
    std::string iface_external_ip = "interface.externalIp";
    std::string iface_mac = "interface.macAddr";
    std::string iface_name = "interface.name";
    std::string iface_is_vpn = "interface.isVpn";
    std::string bandwidth_unit = "bytes_per_second"; // or "mbps"
};

struct ValidationFinding {
    std::string field;
    std::string rule;
};

double convert_bandwidth(double bytes_per_second);

MeasurementReport parse_result(const std::string& raw_document, const FieldMap& map = {});

std::vector<ValidationFinding> validate_report(const MeasurementReport& report);

} // namespace netsense
