#pragma once

#include "netsense/transport.hpp"

#include <cstdint>
#include <functional>
#include <json.hpp>
#include <map>
#include <mutex>
#include <optional>
#include <string>

namespace netsense {

enum class GeoSource { lookup, configured, unavailable };

const char* geo_source_name(GeoSource source);

// City-level only, never the IP it came from.
struct GeoContext {
    std::optional<std::string> city;
    std::optional<std::string> region;
    std::string country; // ISO 3166-1 alpha-2; empty only when unavailable
    std::optional<double> approx_lat;
    std::optional<double> approx_lon;
    GeoSource source = GeoSource::unavailable;
};

nlohmann::json geo_to_json(const GeoContext& geo);

GeoContext coarsen_geo(const nlohmann::json& record);

struct GeoOptions {
    std::string base_url;      // empty disables lookups
    int timeout_ms = 2000;
    std::int64_t ttl_seconds = 3600;
    bool include_coords = true;
};

class GeoClient {
public:
    // steady_now returns monotonic seconds; injectable so tests control the ttl.
    GeoClient(HttpGetter& transport, GeoOptions options,
              std::function<std::int64_t()> steady_now = {});

    GeoContext lookup_ip(const std::string& ip);
    GeoContext cached_lookup(const std::string& ip);

    std::size_t cache_size() const;

private:
    HttpGetter& transport_;
    GeoOptions options_;
    std::function<std::int64_t()> steady_now_;

    struct CacheSlot {
        GeoContext value;
        std::int64_t fetched_at;
    };
    mutable std::mutex mutex_;
    std::map<std::string, CacheSlot> cache_;
};

} // namespace netsense
