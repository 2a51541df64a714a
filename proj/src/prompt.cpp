#include "netsense/prompt.hpp"

#include "netsense/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace netsense {

namespace {

std::string fmt2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string metrics_section(const SanitizedReport& report) {
    std::ostringstream out;
    out << "## Current measurement\n";
    out << "- Download speed: " << fmt2(report.metrics.download_mbps) << " Mbps\n";
    out << "- Upload speed: " << fmt2(report.metrics.upload_mbps) << " Mbps\n";
    out << "- Idle latency: " << fmt2(report.metrics.latency_idle_ms) << " ms\n";
    if (report.metrics.jitter_ms) {
        out << "- Jitter: " << fmt2(*report.metrics.jitter_ms) << " ms\n";
    }
    if (report.metrics.latency_dl_loaded_ms) {
        out << "- Latency under download load: " << fmt2(*report.metrics.latency_dl_loaded_ms)
            << " ms\n";
    }
    if (report.metrics.latency_ul_loaded_ms) {
        out << "- Latency under upload load: " << fmt2(*report.metrics.latency_ul_loaded_ms)
            << " ms\n";
    }
    if (report.metrics.packet_loss_pct) {
        out << "- Packet loss: " << fmt2(*report.metrics.packet_loss_pct) << " percent\n";
    }
    out << "- Local hour of day (0-23): " << report.time_of_day_hour << "\n";
    if (report.isp_name) out << "- Internet provider: " << *report.isp_name << "\n";
    if (report.server_city) out << "- Test server city: " << *report.server_city << "\n";
    if (report.server_country) out << "- Test server country: " << *report.server_country << "\n";
    return out.str();
}

std::string geo_section(const GeoContext& geo) {
    std::ostringstream out;
    out << "## Approximate client location\n";
    if (geo.city) out << "- City: " << *geo.city << "\n";
    if (geo.region) out << "- Region: " << *geo.region << "\n";
    if (!geo.country.empty()) out << "- Country: " << geo.country << "\n";
    if (geo.approx_lat && geo.approx_lon) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "- Approximate coordinates: %.1f, %.1f\n",
                      *geo.approx_lat, *geo.approx_lon);
        out << buf;
    }
    return out.str();
}

std::string history_section(const ContextStats& stats, const char* label) {
    std::ostringstream out;
    out << "## Historical context (" << label << ")\n";
    if (!stats.window_descriptor.empty()) {
        out << "- Window: " << stats.window_descriptor << "\n";
    }
    out << "- Peer measurements: " << stats.n << "\n";
    if (stats.mean_mbps) out << "- Mean throughput: " << fmt2(*stats.mean_mbps) << " Mbps\n";
    if (stats.median_mbps) {
        out << "- Median throughput: " << fmt2(*stats.median_mbps) << " Mbps\n";
    }
    if (stats.stddev_mbps) {
        out << "- Throughput standard deviation: " << fmt2(*stats.stddev_mbps) << " Mbps\n";
    }
    if (stats.avg_fetch_time_ms) {
        out << "- Average fetch time: " << fmt2(*stats.avg_fetch_time_ms) << " ms\n";
    }
    if (stats.percentile_rank_of_current) {
        out << "- Percentile rank of the current measurement: "
            << fmt2(*stats.percentile_rank_of_current)
            << " (0 means below all peers, 1 means above all peers)\n";
    }
    return out.str();
}

} // namespace

const char* prompt_section_name(PromptSection section) {
    switch (section) {
    case PromptSection::metrics: return "metrics";
    case PromptSection::geo: return "geo";
    case PromptSection::history_down: return "history_down";
    case PromptSection::history_up: return "history_up";
    }
    return "unknown";
}

int estimate_tokens(const std::string& text) {
    return static_cast<int>((text.size() + 3) / 4);
}

std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& slots) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        std::size_t open = tmpl.find("{{", pos);
        if (open == std::string::npos) {
            out.append(tmpl, pos, std::string::npos);
            break;
        }
        std::size_t close = tmpl.find("}}", open + 2);
        if (close == std::string::npos) {
            out.append(tmpl, pos, std::string::npos);
            break;
        }
        out.append(tmpl, pos, open - pos);
        std::string name = tmpl.substr(open + 2, close - open - 2);
        auto it = slots.find(name);
        if (it != slots.end()) {
            out += it->second;
        } else {
            out.append(tmpl, open, close + 2 - open);
        }
        pos = close + 2;
    }
    return out;
}

std::string load_text_asset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::file_not_found, "asset '" + path + "' is not readable");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* output_format_block() {
    return "OVERALL: one short paragraph in plain language summarizing what this connection\n"
           "is like to use.\n"
           "METRICS: one line per measured metric, each as \"name = value unit, meaning\",\n"
           "written for someone with no networking background.\n"
           "USE CASES: one line each for online gaming, video streaming, and internet\n"
           "browsing, saying how well this connection supports it.\n"
           "RECOMMENDATIONS: up to three concrete suggestions, one per line, such as\n"
           "optimizing wireless access point placement, using wired connections, or\n"
           "upgrading the internet plan. Write an empty section if nothing is needed.";
}

PromptBundle build_prompt(const SanitizedReport& report, const std::optional<GeoContext>& geo,
                          const std::optional<ContextStats>& stats_down,
                          const std::optional<ContextStats>& stats_up, int budget_tokens,
                          const std::string& system_template) {
    PromptBundle bundle;
    bundle.system_text = render_template(system_template,
                                         {{"output_format", output_format_block()}});

    std::vector<std::pair<PromptSection, std::string>> sections;
    sections.emplace_back(PromptSection::metrics, metrics_section(report));
    if (geo) sections.emplace_back(PromptSection::geo, geo_section(*geo));
    if (stats_down) {
        sections.emplace_back(PromptSection::history_down,
                              history_section(*stats_down, "download"));
    }
    if (stats_up) {
        sections.emplace_back(PromptSection::history_up, history_section(*stats_up, "upload"));
    }

    // Drop whole sections from the back (lowest priority) until the estimate
    // fits; metrics never drops.
    for (;;) {
        std::string user;
        for (std::size_t i = 0; i < sections.size(); ++i) {
            if (i > 0) user += "\n";
            user += sections[i].second;
        }
        int estimate = estimate_tokens(bundle.system_text) + estimate_tokens(user);
        if (estimate <= budget_tokens) {
            bundle.user_text = user;
            bundle.token_estimate = estimate;
            break;
        }
        if (sections.size() == 1) {
            fail(Errc::budget_too_small,
                 "budget cannot fit the instructions and metrics section");
        }
        sections.pop_back();
    }
    for (const auto& entry : sections) bundle.sections_included.insert(entry.first);
    return bundle;
}

} // namespace netsense
