#include "netsense/stats.hpp"

#include "netsense/errors.hpp"

#include <algorithm>
#include <cmath>

namespace netsense {

double percentile_rank(const std::vector<double>& values, double x) {
    if (values.empty()) fail(Errc::empty_input, "percentile rank needs at least one value");
    std::size_t below = 0, equal = 0;
    for (double v : values) {
        if (v < x) ++below;
        else if (v == x) ++equal;
    }
    return (static_cast<double>(below) + 0.5 * static_cast<double>(equal)) /
           static_cast<double>(values.size());
}

ContextStats compute_stats(const std::vector<HistoricalRecord>& records, double current_mbps,
                           const std::string& window_descriptor) {
    ContextStats stats;
    stats.n = records.size();
    stats.window_descriptor = window_descriptor;
    if (records.empty()) return stats;

    std::vector<double> throughputs;
    throughputs.reserve(records.size());
    for (const auto& r : records) throughputs.push_back(r.throughput_mbps);
    double n = static_cast<double>(throughputs.size());

    double sum = 0.0;
    for (double v : throughputs) sum += v;
    double mean = sum / n;
    stats.mean_mbps = mean;

    std::vector<double> sorted = throughputs;
    std::sort(sorted.begin(), sorted.end());
    std::size_t mid = sorted.size() / 2;
    stats.median_mbps = sorted.size() % 2 == 1 ? sorted[mid]
                                               : (sorted[mid - 1] + sorted[mid]) / 2.0;

    if (throughputs.size() >= 2) {
        double ss = 0.0;
        for (double v : throughputs) ss += (v - mean) * (v - mean);
        stats.stddev_mbps = std::sqrt(ss / (n - 1.0));
    }

    double fetch_sum = 0.0;
    std::size_t fetch_n = 0;
    for (const auto& r : records) {
        if (r.fetch_time_ms) {
            fetch_sum += *r.fetch_time_ms;
            ++fetch_n;
        }
    }
    if (fetch_n > 0) stats.avg_fetch_time_ms = fetch_sum / static_cast<double>(fetch_n);

    stats.percentile_rank_of_current = percentile_rank(throughputs, current_mbps);
    return stats;
}

} // namespace netsense
