#include "netsense/kb.hpp"

#include "netsense/clock.hpp"
#include "netsense/csv.hpp"
#include "netsense/errors.hpp"
#include "netsense/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <sstream>

namespace netsense {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string normalize_component(const std::optional<std::string>& c) {
    if (!c) return "";
    std::string out;
    bool pending_space = false;
    for (char ch : *c) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    return out;
}

std::optional<double> parse_double(const std::string& s) {
    std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE) return std::nullopt;
    return v;
}

void validate_query(const RetrievalQuery& q) {
    if (q.limit <= 0 || q.limit > kMaxRetrievalLimit) {
        fail(Errc::invalid_query, "limit must lie within [1, " +
                                      std::to_string(kMaxRetrievalLimit) + "]");
    }
    if (q.hour_local < 0 || q.hour_local > 23) {
        fail(Errc::invalid_query, "hour_local must lie within [0, 23]");
    }
    if (q.window_hours < 0) {
        fail(Errc::invalid_query, "window_hours must be non-negative");
    }
}

// Shared by both stores; rowids (vector positions) break remaining ties so
// the order is total and reproducible.
std::vector<HistoricalRecord> filter_records(const std::vector<HistoricalRecord>& all,
                                             const RetrievalQuery& q) {
    validate_query(q);
    struct Hit {
        const HistoricalRecord* rec;
        std::size_t rowid;
    };
    std::vector<Hit> hits;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const auto& r = all[i];
        if (r.location_key != q.location_key || r.direction != q.direction) continue;
        if (circular_hour_distance(r.hour_local, q.hour_local) > q.window_hours) continue;
        hits.push_back({&r, i});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        if (a.rec->measured_at_utc != b.rec->measured_at_utc) {
            return a.rec->measured_at_utc > b.rec->measured_at_utc;
        }
        if (a.rec->unit_pseudonym != b.rec->unit_pseudonym) {
            return a.rec->unit_pseudonym < b.rec->unit_pseudonym;
        }
        return a.rowid < b.rowid;
    });
    if (hits.size() > static_cast<std::size_t>(q.limit)) {
        hits.resize(static_cast<std::size_t>(q.limit));
    }
    std::vector<HistoricalRecord> out;
    out.reserve(hits.size());
    for (const auto& h : hits) out.push_back(*h.rec);
    return out;
}

std::size_t count_records(const std::vector<HistoricalRecord>& all,
                          const std::optional<std::string>& location_key) {
    if (!location_key) return all.size();
    return static_cast<std::size_t>(
        std::count_if(all.begin(), all.end(), [&](const HistoricalRecord& r) {
            return r.location_key == *location_key;
        }));
}

json record_to_json(const HistoricalRecord& r, std::size_t rowid) {
    json doc;
    doc["rowid"] = rowid;
    doc["unit_pseudonym"] = r.unit_pseudonym;
    doc["location_key"] = r.location_key;
    doc["direction"] = direction_name(r.direction);
    doc["measured_at_utc"] = r.measured_at_utc;
    doc["hour_local"] = r.hour_local;
    doc["throughput_mbps"] = r.throughput_mbps;
    if (r.fetch_time_ms) doc["fetch_time_ms"] = *r.fetch_time_ms;
    if (r.isp) doc["isp"] = *r.isp;
    return doc;
}

HistoricalRecord record_from_json(const json& doc) {
    HistoricalRecord r;
    r.unit_pseudonym = doc.at("unit_pseudonym").get<std::string>();
    r.location_key = doc.at("location_key").get<std::string>();
    auto dir = direction_from_name(doc.at("direction").get<std::string>());
    if (!dir) throw std::runtime_error("bad direction");
    r.direction = *dir;
    r.measured_at_utc = doc.at("measured_at_utc").get<std::int64_t>();
    r.hour_local = doc.at("hour_local").get<int>();
    r.throughput_mbps = doc.at("throughput_mbps").get<double>();
    if (doc.contains("fetch_time_ms")) r.fetch_time_ms = doc["fetch_time_ms"].get<double>();
    if (doc.contains("isp")) r.isp = doc["isp"].get<std::string>();
    return r;
}

} // namespace

const char* direction_name(Direction d) {
    return d == Direction::download ? "download" : "upload";
}

std::optional<Direction> direction_from_name(const std::string& name) {
    if (name == "download" || name == "down") return Direction::download;
    if (name == "upload" || name == "up") return Direction::upload;
    return std::nullopt;
}

std::string normalize_location(const std::optional<std::string>& city,
                               const std::optional<std::string>& region,
                               const std::optional<std::string>& country) {
    std::string c = normalize_component(city);
    std::string r = normalize_component(region);
    std::string k = normalize_component(country);
    if (c.empty() && r.empty() && k.empty()) {
        fail(Errc::all_components_empty, "location needs at least one component");
    }
    return c + "|" + r + "|" + k;
}

int circular_hour_distance(int h1, int h2) {
    int d = std::abs(h1 - h2);
    return std::min(d, 24 - d);
}

void MemoryStore::append_all(const std::vector<HistoricalRecord>& records) {
    std::unique_lock lock(mutex_);
    records_.insert(records_.end(), records.begin(), records.end());
}

std::vector<HistoricalRecord> MemoryStore::query_similar(const RetrievalQuery& q) const {
    std::shared_lock lock(mutex_);
    return filter_records(records_, q);
}

std::size_t MemoryStore::record_count(const std::optional<std::string>& location_key) const {
    std::shared_lock lock(mutex_);
    return count_records(records_, location_key);
}

FileStore::FileStore(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return; // fresh store
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        json doc = json::parse(line, nullptr, false);
        if (doc.is_discarded()) {
            fail(Errc::storage_failure,
                 "store file line " + std::to_string(lineno) + " is not parseable");
        }
        try {
            records_.push_back(record_from_json(doc));
        } catch (const std::exception&) {
            fail(Errc::storage_failure,
                 "store file line " + std::to_string(lineno) + " has a malformed record");
        }
    }
}

void FileStore::append_all(const std::vector<HistoricalRecord>& records) {
    std::unique_lock lock(mutex_);
    std::string tmp_path = path_ + ".tmp";
    {
        std::ofstream out(tmp_path, std::ios::trunc);
        if (!out) fail(Errc::storage_failure, "cannot open temp store file for writing");
        std::size_t rowid = 0;
        for (const auto& r : records_) out << record_to_json(r, rowid++).dump() << '\n';
        for (const auto& r : records) out << record_to_json(r, rowid++).dump() << '\n';
        out.flush();
        if (!out) fail(Errc::storage_failure, "short write to temp store file");
    }
    std::error_code ec;
    std::filesystem::rename(tmp_path, path_, ec);
    if (ec) fail(Errc::storage_failure, "cannot replace store file: " + ec.message());
    records_.insert(records_.end(), records.begin(), records.end());
}

std::vector<HistoricalRecord> FileStore::query_similar(const RetrievalQuery& q) const {
    std::shared_lock lock(mutex_);
    return filter_records(records_, q);
}

std::size_t FileStore::record_count(const std::optional<std::string>& location_key) const {
    std::shared_lock lock(mutex_);
    return count_records(records_, location_key);
}

UnitLocationMap load_unit_locations(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::file_not_found, "unit location file '" + path + "' is not readable");

    std::vector<std::string> header;
    if (!read_csv_row(in, header)) {
        fail(Errc::header_mismatch, "unit location file has no header row");
    }
    auto col = [&header](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (trim(header[i]) == name) return i;
        }
        return std::nullopt;
    };
    auto unit_col = col("unit_id");
    auto city_col = col("city");
    auto region_col = col("region");
    auto country_col = col("country");
    if (!unit_col || !city_col || !region_col || !country_col) {
        fail(Errc::header_mismatch,
             "unit location file must name unit_id, city, region, country columns");
    }
    auto offset_col = col("utc_offset_minutes");
    auto isp_col = col("isp");

    UnitLocationMap units;
    std::vector<std::string> row;
    while (read_csv_row(in, row)) {
        auto cell = [&row](std::optional<std::size_t> idx) -> std::string {
            if (!idx || *idx >= row.size()) return "";
            return trim(row[*idx]);
        };
        std::string unit = cell(unit_col);
        if (unit.empty()) continue;
        UnitLocation loc;
        loc.city = cell(city_col);
        loc.region = cell(region_col);
        loc.country = cell(country_col);
        std::string offset = cell(offset_col);
        if (!offset.empty()) {
            if (auto v = parse_double(offset)) {
                loc.utc_offset_minutes = static_cast<int>(*v);
            }
        }
        std::string isp = cell(isp_col);
        if (!isp.empty()) loc.isp = isp;
        units[unit] = loc;
    }
    return units;
}

IngestResult ingest_csv(KbStorage& store, const std::string& path, const ColumnMap& map,
                        Direction direction, const UnitLocationMap& units, HourPolicy policy) {
    std::ifstream in(path);
    if (!in) fail(Errc::file_not_found, "measurement file '" + path + "' is not readable");

    std::vector<std::string> header;
    if (!read_csv_row(in, header)) {
        fail(Errc::header_mismatch, "measurement file has no header row");
    }
    auto col = [&header](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (trim(header[i]) == name) return i;
        }
        return std::nullopt;
    };
    auto unit_col = col(map.unit_id);
    auto time_col = col(map.timestamp);
    auto tput_col = col(map.throughput);
    if (!unit_col || !time_col || !tput_col) {
        fail(Errc::header_mismatch, "mapped columns are absent from the header");
    }
    std::optional<std::size_t> fetch_col;
    if (!map.fetch_time.empty()) {
        fetch_col = col(map.fetch_time);
        if (!fetch_col) fail(Errc::header_mismatch, "mapped fetch-time column is absent");
    }

    IngestResult result;
    auto skip = [&result](const char* reason) {
        ++result.skipped;
        ++result.skip_reasons[reason];
    };

    std::vector<HistoricalRecord> parsed;
    std::vector<std::string> row;
    while (read_csv_row(in, row)) {
        if (row.size() == 1 && trim(row[0]).empty()) continue; // blank line
        std::size_t needed = std::max({*unit_col, *time_col, *tput_col,
                                       fetch_col ? *fetch_col : 0});
        if (row.size() <= needed) {
            skip("bad_field_count");
            continue;
        }

        std::string unit = trim(row[*unit_col]);
        auto unit_it = units.find(unit);
        if (unit.empty() || unit_it == units.end()) {
            skip("no_unit_location");
            continue;
        }
        const UnitLocation& loc = unit_it->second;

        auto instant = parse_instant(trim(row[*time_col]));
        if (!instant) {
            skip("bad_timestamp");
            continue;
        }

        auto tput = parse_double(row[*tput_col]);
        if (!tput) {
            skip("bad_number");
            continue;
        }
        double mbps;
        if (map.throughput_unit == "mbps") {
            mbps = *tput;
        } else {
            if (!std::isfinite(*tput) || *tput < 0.0) {
                skip("out_of_range");
                continue;
            }
            mbps = convert_bandwidth(*tput);
        }
        if (!std::isfinite(mbps) || mbps < 0.0) {
            skip("out_of_range");
            continue;
        }

        HistoricalRecord rec;
        rec.unit_pseudonym = unit;
        try {
            rec.location_key = normalize_location(loc.city, loc.region, loc.country);
        } catch (const Error&) {
            skip("empty_location");
            continue;
        }
        rec.direction = direction;
        rec.measured_at_utc = *instant;
        int offset_minutes = 0;
        if (policy == HourPolicy::map_offset && loc.utc_offset_minutes) {
            offset_minutes = *loc.utc_offset_minutes;
        }
        rec.hour_local = utc_hour(*instant + static_cast<std::int64_t>(offset_minutes) * 60);
        rec.throughput_mbps = mbps;

        if (fetch_col && *fetch_col < row.size()) {
            std::string cell = trim(row[*fetch_col]);
            if (!cell.empty()) {
                auto fetch = parse_double(cell);
                if (!fetch) {
                    skip("bad_number");
                    continue;
                }
                double ms = *fetch;
                if (map.fetch_time_unit == "microseconds") {
                    ms /= 1000.0;
                } else if (map.fetch_time_unit == "seconds") {
                    ms *= 1000.0;
                }
                if (!std::isfinite(ms) || ms < 0.0) {
                    skip("out_of_range");
                    continue;
                }
                rec.fetch_time_ms = ms;
            }
        }
        rec.isp = loc.isp;
        parsed.push_back(std::move(rec));
    }

    store.append_all(parsed);
    result.ingested = parsed.size();
    return result;
}

} // namespace netsense
