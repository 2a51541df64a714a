#include "netsense/fallback.hpp"

#include "netsense/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

namespace netsense {

namespace {

struct Miss {
    const char* metric; // download, upload, latency, loss
    double relative;
};

// Relative shortfall against an inclusive bound; a zero bound that is missed
// counts as infinitely violated.
double relative_miss(double diff, double bound) {
    if (bound <= 0.0) return std::numeric_limits<double>::infinity();
    return diff / bound;
}

const char* metric_phrase(const std::string& metric) {
    if (metric == "download") return "download speed";
    if (metric == "upload") return "upload speed";
    if (metric == "latency") return "latency";
    if (metric == "loss") return "packet loss";
    return "measurement";
}

std::string fmt2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

} // namespace

const char* use_case_name(UseCase u) {
    switch (u) {
    case UseCase::gaming: return "gaming";
    case UseCase::video_streaming: return "video_streaming";
    case UseCase::browsing: return "browsing";
    }
    return "unknown";
}

const char* use_case_display(UseCase u) {
    switch (u) {
    case UseCase::gaming: return "online gaming";
    case UseCase::video_streaming: return "video streaming";
    case UseCase::browsing: return "internet browsing";
    }
    return "unknown";
}

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::good: return "good";
    case Verdict::marginal: return "marginal";
    case Verdict::poor: return "poor";
    }
    return "unknown";
}

std::vector<UseCaseThresholds> default_thresholds() {
    return {
        {UseCase::gaming, 10.0, 3.0, 50.0, 1.0},
        {UseCase::video_streaming, 25.0, 3.0, 150.0, 2.0},
        {UseCase::browsing, 5.0, 1.0, 200.0, 5.0},
    };
}

std::vector<Assessment> assess_use_cases(const SanitizedReport& report,
                                         const std::vector<UseCaseThresholds>& thresholds) {
    std::set<UseCase> seen;
    for (const auto& t : thresholds) {
        if (!seen.insert(t.use_case).second) {
            fail(Errc::duplicate_use_case,
                 std::string("use case '") + use_case_name(t.use_case) + "' appears twice");
        }
    }

    const Metrics& m = report.metrics;
    std::vector<Assessment> out;
    out.reserve(thresholds.size());
    for (const auto& t : thresholds) {
        // Fixed metric order doubles as the tie-break order.
        std::vector<Miss> misses;
        if (m.download_mbps < t.min_download_mbps) {
            misses.push_back({"download", relative_miss(t.min_download_mbps - m.download_mbps,
                                                        t.min_download_mbps)});
        }
        if (m.upload_mbps < t.min_upload_mbps) {
            misses.push_back({"upload", relative_miss(t.min_upload_mbps - m.upload_mbps,
                                                      t.min_upload_mbps)});
        }
        if (m.latency_idle_ms > t.max_latency_ms) {
            misses.push_back({"latency", relative_miss(m.latency_idle_ms - t.max_latency_ms,
                                                       t.max_latency_ms)});
        }
        if (m.packet_loss_pct && *m.packet_loss_pct > t.max_loss_pct) {
            misses.push_back({"loss", relative_miss(*m.packet_loss_pct - t.max_loss_pct,
                                                    t.max_loss_pct)});
        }

        Assessment a;
        a.use_case = t.use_case;
        if (misses.empty()) {
            a.verdict = Verdict::good;
        } else {
            a.verdict = misses.size() == 1 && misses[0].relative < 0.25 ? Verdict::marginal
                                                                        : Verdict::poor;
            const Miss* worst = &misses[0];
            for (const auto& miss : misses) {
                if (miss.relative > worst->relative) worst = &miss;
            }
            a.limiting_metric = worst->metric;
        }
        out.push_back(std::move(a));
    }
    return out;
}

std::vector<MetricLine> metric_lines(const Metrics& metrics) {
    std::vector<MetricLine> lines;
    lines.push_back({"download", metrics.download_mbps, "Mbps",
                     metric_explanation("download")});
    lines.push_back({"upload", metrics.upload_mbps, "Mbps", metric_explanation("upload")});
    lines.push_back({"latency_idle", metrics.latency_idle_ms, "ms",
                     metric_explanation("latency_idle")});
    if (metrics.jitter_ms) {
        lines.push_back({"jitter", *metrics.jitter_ms, "ms", metric_explanation("jitter")});
    }
    if (metrics.latency_dl_loaded_ms) {
        lines.push_back({"latency_dl_loaded", *metrics.latency_dl_loaded_ms, "ms",
                         metric_explanation("latency_dl_loaded")});
    }
    if (metrics.latency_ul_loaded_ms) {
        lines.push_back({"latency_ul_loaded", *metrics.latency_ul_loaded_ms, "ms",
                         metric_explanation("latency_ul_loaded")});
    }
    if (metrics.packet_loss_pct) {
        lines.push_back({"packet_loss", *metrics.packet_loss_pct, "percent",
                         metric_explanation("packet_loss")});
    }
    return lines;
}

const char* metric_explanation(const std::string& metric) {
    if (metric == "download") {
        return "How quickly data reaches you. Higher means faster downloads and smoother "
               "streaming.";
    }
    if (metric == "upload") {
        return "How quickly you can send data. It matters for video calls, backups, and "
               "sharing files.";
    }
    if (metric == "latency_idle") {
        return "How long one round trip takes while the line is quiet. Lower feels snappier.";
    }
    if (metric == "jitter") {
        return "How much the delay wobbles from moment to moment. Lower keeps calls and "
               "games smooth.";
    }
    if (metric == "latency_dl_loaded") {
        return "Round-trip delay while the line is busy downloading. Large values mean lag "
               "during heavy use.";
    }
    if (metric == "latency_ul_loaded") {
        return "Round-trip delay while the line is busy uploading. Large values disturb "
               "calls while sending files.";
    }
    if (metric == "packet_loss") {
        return "The share of data that never arrives. Even small amounts disrupt calls and "
               "games.";
    }
    return "A measured property of this connection.";
}

InterpretationSummary fallback_summary(const SanitizedReport& report,
                                       const std::vector<Assessment>& assessments,
                                       const std::optional<ContextStats>& stats_down) {
    InterpretationSummary summary;
    summary.llm_used = false;
    summary.disclaimer = summary_disclaimer();
    summary.per_metric = metric_lines(report.metrics);

    bool any_poor = false, any_marginal = false;
    for (const auto& a : assessments) {
        if (a.verdict == Verdict::poor) any_poor = true;
        if (a.verdict == Verdict::marginal) any_marginal = true;

        UseCaseImpact impact;
        impact.use_case = use_case_display(a.use_case);
        switch (a.verdict) {
        case Verdict::good:
            impact.text = std::string("Works well. The measured speeds and responsiveness "
                                      "meet the needs of ") +
                          use_case_display(a.use_case) + ".";
            break;
        case Verdict::marginal:
            impact.text = std::string("Mostly fine. The ") + metric_phrase(*a.limiting_metric) +
                          " is close to the comfortable limit for " +
                          use_case_display(a.use_case) + ", so occasional hiccups are possible.";
            break;
        case Verdict::poor:
            impact.text = std::string("Likely to struggle. The ") +
                          metric_phrase(*a.limiting_metric) + " falls short of what " +
                          use_case_display(a.use_case) + " needs.";
            break;
        }
        summary.use_case_impacts.push_back(std::move(impact));
    }

    if (any_poor) {
        summary.overall_text =
            "Overall, this connection is likely to struggle with some common uses.";
    } else if (any_marginal) {
        summary.overall_text = "Overall, this connection handles most everyday tasks, though "
                               "it runs close to the limit for some uses.";
    } else {
        summary.overall_text = "Overall, this connection is in good shape for everyday use. "
                               "Speeds, latency, and reliability are all within comfortable "
                               "ranges.";
    }
    if (stats_down && stats_down->percentile_rank_of_current) {
        summary.overall_text += " Compared with nearby measurements taken around the same "
                                "hour, this download speed has percentile rank " +
                                fmt2(*stats_down->percentile_rank_of_current) +
                                " (0 means slowest, 1 means fastest).";
    }

    // Recommendations keyed to the limiting metrics, deduplicated, stable order.
    std::vector<std::string> recs;
    auto add = [&recs](const char* text) {
        if (std::find(recs.begin(), recs.end(), text) == recs.end()) recs.emplace_back(text);
    };
    for (const auto& a : assessments) {
        if (a.verdict == Verdict::good) continue;
        const std::string& metric = *a.limiting_metric;
        if (metric == "download") {
            add("Consider upgrading the internet plan if faster downloads are needed.");
            add("Optimizing wireless access point placement can recover speed lost to Wi-Fi.");
        } else if (metric == "upload") {
            add("Consider upgrading the internet plan if faster uploads are needed.");
        } else if (metric == "latency" || metric == "loss") {
            add("Using wired connections instead of Wi-Fi usually lowers delay and loss.");
            add("Optimizing wireless access point placement can reduce delay and instability.");
        }
    }
    summary.recommendations = std::move(recs);
    return summary;
}

} // namespace netsense
