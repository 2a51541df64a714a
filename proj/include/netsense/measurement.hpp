#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace netsense {

struct ServerInfo {
    std::optional<std::string> id;
    std::optional<std::string> host;
    std::optional<int> port;
    std::optional<std::string> name;
    std::optional<std::string> city;
    std::optional<std::string> country;
    std::optional<std::string> ip;
};

struct InterfaceInfo {
    std::optional<std::string> internal_ip;
    std::optional<std::string> external_ip;
    std::optional<std::string> mac_addr;
    std::optional<std::string> name;
    std::optional<bool> is_vpn;
};

struct MeasurementReport {
    double download_mbps = 0.0;
    double upload_mbps = 0.0;
    double latency_idle_ms = 0.0;
    std::optional<double> jitter_ms;
    std::optional<double> latency_dl_loaded_ms;
    std::optional<double> latency_ul_loaded_ms;
    std::optional<double> packet_loss_pct;
    std::optional<std::string> isp_name;
    ServerInfo server;
    InterfaceInfo client_interface;
    std::int64_t timestamp_utc = 0;    // epoch seconds
    std::string timestamp_text;        // wire form, kept for round-trips
    std::optional<std::string> test_id;
    std::optional<std::string> result_url;
    std::string raw;                   // original document, byte for byte
};

} // namespace netsense
