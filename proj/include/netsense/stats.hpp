#pragma once

#include "netsense/kb.hpp"

#include <optional>
#include <string>
#include <vector>

namespace netsense {

struct ContextStats {
    std::size_t n = 0;
    std::optional<double> mean_mbps;
    std::optional<double> median_mbps;
    std::optional<double> stddev_mbps;
    std::optional<double> avg_fetch_time_ms;
    std::optional<double> percentile_rank_of_current; // in [0, 1]
    std::string window_descriptor;
};

// Midrank convention: (count(v < x) + 0.5 * count(v = x)) / n.
double percentile_rank(const std::vector<double>& values, double x);

ContextStats compute_stats(const std::vector<HistoricalRecord>& records, double current_mbps,
                           const std::string& window_descriptor = "");

} // namespace netsense
