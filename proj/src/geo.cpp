#include "netsense/geo.hpp"

#include "netsense/errors.hpp"
#include "netsense/patterns.hpp"

#include <chrono>
#include <cmath>

namespace netsense {

namespace {

using nlohmann::json;

std::optional<std::string> nonempty_text(const json& record, const char* key) {
    auto it = record.find(key);
    if (it == record.end() || !it->is_string()) return std::nullopt;
    auto s = it->get<std::string>();
    if (s.empty()) return std::nullopt;
    return s;
}

std::optional<double> number_at(const json& record, const char* key) {
    auto it = record.find(key);
    if (it == record.end() || !it->is_number()) return std::nullopt;
    return it->get<double>();
}

double round_1dp(double v) { return std::round(v * 10.0) / 10.0; }

} // namespace

const char* geo_source_name(GeoSource source) {
    switch (source) {
    case GeoSource::lookup: return "lookup";
    case GeoSource::configured: return "configured";
    case GeoSource::unavailable: return "unavailable";
    }
    return "unknown";
}

nlohmann::json geo_to_json(const GeoContext& geo) {
    json doc;
    if (geo.city) doc["city"] = *geo.city;
    if (geo.region) doc["region"] = *geo.region;
    doc["country"] = geo.country;
    if (geo.approx_lat) doc["lat"] = *geo.approx_lat;
    if (geo.approx_lon) doc["lon"] = *geo.approx_lon;
    doc["source"] = geo_source_name(geo.source);
    return doc;
}

GeoContext coarsen_geo(const nlohmann::json& record) {
    if (!record.is_object()) fail(Errc::missing_country, "location record is not structured");
    GeoContext geo;
    auto country = nonempty_text(record, "country");
    if (!country) fail(Errc::missing_country, "location record lacks a country code");
    geo.country = *country;
    geo.city = nonempty_text(record, "city");
    geo.region = nonempty_text(record, "region");

    auto lat = number_at(record, "lat");
    auto lon = number_at(record, "lon");
    if (lat && lon) {
        double rlat = round_1dp(*lat);
        double rlon = round_1dp(*lon);
        if (rlat >= -90.0 && rlat <= 90.0 && rlon >= -180.0 && rlon <= 180.0) {
            geo.approx_lat = rlat;
            geo.approx_lon = rlon;
        }
    }
    geo.source = GeoSource::configured;
    return geo;
}

GeoClient::GeoClient(HttpGetter& transport, GeoOptions options,
                     std::function<std::int64_t()> steady_now)
    : transport_(transport), options_(std::move(options)), steady_now_(std::move(steady_now)) {
    if (!steady_now_) {
        steady_now_ = [] {
            auto now = std::chrono::steady_clock::now().time_since_epoch();
            return std::chrono::duration_cast<std::chrono::seconds>(now).count();
        };
    }
}

GeoContext GeoClient::lookup_ip(const std::string& ip) {
    if (classify_ip(ip) != IpScope::public_addr) {
        fail(Errc::private_address, "address is not publicly geolocatable");
    }
    std::string url = options_.base_url;
    if (!url.empty() && url.back() == '/') url.pop_back();
    url += "/" + ip;

    auto res = transport_.get(url, options_.timeout_ms);
    if (!res) fail(Errc::provider_timeout, "geolocation provider did not answer in time");
    if (res->status < 200 || res->status >= 300) {
        fail(Errc::provider_error,
             "geolocation provider returned status " + std::to_string(res->status));
    }
    json record = json::parse(res->body, nullptr, false);
    if (record.is_discarded()) {
        fail(Errc::provider_error, "geolocation provider returned an unparseable body");
    }

    GeoContext geo;
    try {
        geo = coarsen_geo(record);
    } catch (const Error&) {
        fail(Errc::provider_error, "geolocation provider response lacks a country code");
    }
    if (!options_.include_coords) {
        geo.approx_lat.reset();
        geo.approx_lon.reset();
    }
    geo.source = GeoSource::lookup;
    return geo;
}

GeoContext GeoClient::cached_lookup(const std::string& ip) {
    std::int64_t now = steady_now_();
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(ip);
        if (it != cache_.end() && now - it->second.fetched_at < options_.ttl_seconds) {
            return it->second.value;
        }
    }
    GeoContext fresh = lookup_ip(ip);
    std::lock_guard<std::mutex> lock(mutex_);
    cache_[ip] = {fresh, now};
    return fresh;
}

std::size_t GeoClient::cache_size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.size();
}

} // namespace netsense
