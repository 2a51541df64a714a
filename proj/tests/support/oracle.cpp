#include "support/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>

namespace netsense::testing {

OracleStats oracle_stats(std::vector<double> values, double current) {
    OracleStats out;
    out.n = values.size();
    if (values.empty()) return out;

    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(values.size());

    std::sort(values.begin(), values.end());
    std::size_t mid = values.size() / 2;
    out.median = values.size() % 2 == 1 ? values[mid] : (values[mid - 1] + values[mid]) / 2.0;

    if (values.size() >= 2) {
        double acc = 0.0;
        for (double v : values) acc += (v - *out.mean) * (v - *out.mean);
        out.stddev = std::sqrt(acc / static_cast<double>(values.size() - 1));
    }

    double below = 0.0, equal = 0.0;
    for (double v : values) {
        if (v < current) below += 1.0;
        else if (v == current) equal += 1.0;
    }
    out.rank = (below + 0.5 * equal) / static_cast<double>(values.size());
    return out;
}

std::vector<HistoricalRecord> oracle_filter(const std::vector<HistoricalRecord>& all,
                                            const RetrievalQuery& q) {
    int dist_limit = q.window_hours >= 12 ? 12 : q.window_hours;
    std::vector<HistoricalRecord> hits;
    for (const auto& rec : all) {
        if (rec.location_key != q.location_key) continue;
        if (rec.direction != q.direction) continue;
        int diff = std::abs(rec.hour_local - q.hour_local);
        int dist = std::min(diff, 24 - diff);
        if (dist > dist_limit) continue;
        hits.push_back(rec);
    }
    // stable_sort keeps insertion order for full ties, which is the rowid rule.
    std::stable_sort(hits.begin(), hits.end(),
                     [](const HistoricalRecord& a, const HistoricalRecord& b) {
                         if (a.measured_at_utc != b.measured_at_utc)
                             return a.measured_at_utc > b.measured_at_utc;
                         return a.unit_pseudonym < b.unit_pseudonym;
                     });
    if (hits.size() > static_cast<std::size_t>(q.limit)) hits.resize(static_cast<std::size_t>(q.limit));
    return hits;
}

TempDir::TempDir() {
    static std::mt19937_64 rng{std::random_device{}()};
    auto base = std::filesystem::temp_directory_path();
    for (int i = 0; i < 64; ++i) {
        auto candidate = base / ("netsense_test_" + std::to_string(rng()));
        std::error_code ec;
        if (std::filesystem::create_directory(candidate, ec) && !ec) {
            path_ = candidate.string();
            return;
        }
    }
    std::abort();
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

std::string TempDir::file(const std::string& name) const {
    return (std::filesystem::path(path_) / name).string();
}

} // namespace netsense::testing
