#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace netsense {

enum class Direction { download, upload };

const char* direction_name(Direction d);
std::optional<Direction> direction_from_name(const std::string& name);

struct HistoricalRecord {
    std::string unit_pseudonym;
    std::string location_key;
    Direction direction = Direction::download;
    std::int64_t measured_at_utc = 0;
    int hour_local = 0;
    double throughput_mbps = 0.0;
    std::optional<double> fetch_time_ms;
    std::optional<std::string> isp;
};

struct RetrievalQuery {
    std::string location_key;
    int hour_local = 0;
    int window_hours = 1;
    Direction direction = Direction::download;
    int limit = 200;
};

inline constexpr int kMaxRetrievalLimit = 500;

std::string normalize_location(const std::optional<std::string>& city,
                               const std::optional<std::string>& region,
                               const std::optional<std::string>& country);

int circular_hour_distance(int h1, int h2);

class KbStorage {
public:
    virtual ~KbStorage() = default;

    // All-or-nothing: either every record lands or none do.
    virtual void append_all(const std::vector<HistoricalRecord>& records) = 0;
    virtual std::vector<HistoricalRecord> query_similar(const RetrievalQuery& q) const = 0;
    virtual std::size_t record_count(const std::optional<std::string>& location_key = {}) const = 0;
};

class MemoryStore : public KbStorage {
public:
    void append_all(const std::vector<HistoricalRecord>& records) override;
    std::vector<HistoricalRecord> query_similar(const RetrievalQuery& q) const override;
    std::size_t record_count(const std::optional<std::string>& location_key = {}) const override;

private:
    mutable std::shared_mutex mutex_;
    std::vector<HistoricalRecord> records_;
};

// One JSON document per line; appends rewrite to a temp file and rename over
// the original so readers never observe a partial file.
class FileStore : public KbStorage {
public:
    explicit FileStore(std::string path);

    void append_all(const std::vector<HistoricalRecord>& records) override;
    std::vector<HistoricalRecord> query_similar(const RetrievalQuery& q) const override;
    std::size_t record_count(const std::optional<std::string>& location_key = {}) const override;

private:
    std::string path_;
    mutable std::shared_mutex mutex_;
    std::vector<HistoricalRecord> records_;
};

struct ColumnMap {
    std::string unit_id = "unit_id";
    std::string timestamp = "dtime";
    std::string throughput = "bytes_sec";
    std::string fetch_time = "fetch_time";          // "" disables the column
    std::string throughput_unit = "bytes_per_second"; // or "mbps"
    std::string fetch_time_unit = "microseconds";   // or "milliseconds", "seconds"
};

struct UnitLocation {
    std::string city;
    std::string region;
    std::string country;
    std::optional<int> utc_offset_minutes;
    std::optional<std::string> isp;
};

using UnitLocationMap = std::map<std::string, UnitLocation>;

UnitLocationMap load_unit_locations(const std::string& path);

enum class HourPolicy { map_offset, utc };

struct IngestResult {
    std::size_t ingested = 0;
    std::size_t skipped = 0;
    std::map<std::string, std::size_t> skip_reasons;
};

IngestResult ingest_csv(KbStorage& store, const std::string& path, const ColumnMap& map,
                        Direction direction, const UnitLocationMap& units, HourPolicy policy);

} // namespace netsense
