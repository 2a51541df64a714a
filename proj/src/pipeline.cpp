#include "netsense/pipeline.hpp"

#include "netsense/errors.hpp"
#include "netsense/fallback.hpp"
#include "netsense/ingest.hpp"
#include "netsense/sanitize.hpp"
#include "netsense/stats.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <condition_variable>
#include <mutex>
#include <sstream>

namespace netsense {

namespace {

std::string to_lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim_ws(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string strip_bullet(const std::string& line) {
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    while (i < line.size() && (line[i] == '-' || line[i] == '*' || line[i] == '>')) ++i;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    return line.substr(i);
}

enum class Label { none, overall, metrics, use_cases, recommendations };

// A label is a known word at the start of the line followed by a colon or
// nothing else; anything after the colon is the section's first content.
Label match_label(const std::string& line, std::string& remainder) {
    std::string head = strip_bullet(line);
    std::string upper;
    upper.reserve(head.size());
    for (char c : head) {
        if (c == '-' || c == '_') upper.push_back(' ');
        else upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    struct Candidate {
        const char* text;
        Label label;
    };
    static const Candidate candidates[] = {
        {"OVERALL", Label::overall},
        {"METRICS", Label::metrics},
        {"USE CASES", Label::use_cases},
        {"RECOMMENDATIONS", Label::recommendations},
    };
    for (const auto& cand : candidates) {
        std::size_t len = std::string(cand.text).size();
        if (upper.rfind(cand.text, 0) != 0) continue;
        std::string after = upper.substr(len);
        std::size_t skip = 0;
        while (skip < after.size() && after[skip] == ' ') ++skip;
        if (skip == after.size()) {
            remainder = "";
            return cand.label;
        }
        if (after[skip] == ':') {
            remainder = trim_ws(head.substr(len + skip + 1));
            return cand.label;
        }
    }
    return Label::none;
}

std::optional<std::string> find_line_with(const std::vector<std::string>& lines,
                                          std::initializer_list<const char*> all_of,
                                          std::initializer_list<const char*> none_of) {
    for (const auto& line : lines) {
        std::string lower = to_lower(line);
        bool ok = true;
        for (const char* needle : all_of) {
            if (lower.find(needle) == std::string::npos) ok = false;
        }
        for (const char* needle : none_of) {
            if (lower.find(needle) != std::string::npos) ok = false;
        }
        if (ok) return line;
    }
    return std::nullopt;
}

std::optional<std::string> match_metric_line(const std::vector<std::string>& lines,
                                             const std::string& metric) {
    if (metric == "jitter") return find_line_with(lines, {"jitter"}, {});
    if (metric == "packet_loss") return find_line_with(lines, {"loss"}, {"load"});
    if (metric == "latency_dl_loaded") return find_line_with(lines, {"latency", "download"}, {});
    if (metric == "latency_ul_loaded") return find_line_with(lines, {"latency", "upload"}, {});
    if (metric == "latency_idle") {
        return find_line_with(lines, {"latency"}, {"download", "upload"});
    }
    if (metric == "download") return find_line_with(lines, {"download"}, {"latency"});
    if (metric == "upload") return find_line_with(lines, {"upload"}, {"latency"});
    return std::nullopt;
}

std::string use_case_keyword(const std::string& display) {
    auto space = display.rfind(' ');
    std::string last = space == std::string::npos ? display : display.substr(space + 1);
    return to_lower(last);
}

} // namespace

ModelOutput parse_model_output(const std::string& content) {
    ModelOutput out;
    std::vector<std::string> overall_lines;
    Label current = Label::overall; // pre-label prose belongs to overall

    auto push = [&](Label target, const std::string& line) {
        if (line.empty()) return;
        switch (target) {
        case Label::metrics: out.metric_lines.push_back(line); break;
        case Label::use_cases: out.use_case_lines.push_back(line); break;
        case Label::recommendations: out.recommendations.push_back(line); break;
        default: overall_lines.push_back(line); break;
        }
    };

    std::istringstream in(content);
    std::string raw_line;
    while (std::getline(in, raw_line)) {
        std::string remainder;
        Label label = match_label(raw_line, remainder);
        if (label != Label::none) {
            out.any_labels = true;
            current = label;
            push(current, trim_ws(remainder));
            continue;
        }
        std::string line = trim_ws(current == Label::overall ? raw_line : strip_bullet(raw_line));
        push(current, line);
    }

    std::string overall;
    for (const auto& line : overall_lines) {
        if (!overall.empty()) overall += " ";
        overall += line;
    }
    out.overall = overall;
    return out;
}

class ConcurrencyGate::Impl {
public:
    Impl(int max_inflight, int queue_wait_ms)
        : available_(max_inflight), queue_wait_ms_(queue_wait_ms) {}

    bool try_acquire() {
        std::unique_lock<std::mutex> lock(mutex_);
        if (!cv_.wait_for(lock, std::chrono::milliseconds(queue_wait_ms_),
                          [this] { return available_ > 0; })) {
            return false;
        }
        --available_;
        return true;
    }

    void release() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            ++available_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int available_;
    int queue_wait_ms_;
};

ConcurrencyGate::ConcurrencyGate(int max_inflight, int queue_wait_ms)
    : impl_(std::make_shared<Impl>(max_inflight, queue_wait_ms)) {}

bool ConcurrencyGate::try_acquire() { return impl_->try_acquire(); }
void ConcurrencyGate::release() { impl_->release(); }

Pipeline::Pipeline(PipelineConfig cfg, PipelineParts parts)
    : cfg_(std::move(cfg)), parts_(std::move(parts)), rules_(default_redaction_rules()) {}

void Pipeline::set_prompt_observer(std::function<void(const PromptBundle&)> observer) {
    prompt_observer_ = std::move(observer);
}

InterpretationSummary Pipeline::interpret(const std::string& raw_document) {
    MeasurementReport report = parse_result(raw_document, cfg_.field_map);
    SanitizedReport sanitized = sanitize_report(report, rules_, cfg_.utc_offset_minutes);

    GeoContext geo_ctx;
    geo_ctx.source = GeoSource::unavailable;
    if (parts_.geo && report.client_interface.external_ip) {
        try {
            geo_ctx = parts_.geo->cached_lookup(*report.client_interface.external_ip);
        } catch (const Error&) {
            geo_ctx = GeoContext{};
            geo_ctx.source = GeoSource::unavailable;
        }
    }
    bool geo_used = geo_ctx.source == GeoSource::lookup;

    auto geo_key = [&]() -> std::optional<std::string> {
        if (!geo_used) return std::nullopt;
        try {
            std::optional<std::string> country;
            if (!geo_ctx.country.empty()) country = geo_ctx.country;
            return normalize_location(geo_ctx.city, geo_ctx.region, country);
        } catch (const Error&) {
            return std::nullopt;
        }
    };
    auto server_key = [&]() -> std::optional<std::string> {
        if (!sanitized.server_city && !sanitized.server_country) return std::nullopt;
        try {
            return normalize_location(sanitized.server_city, std::nullopt,
                                      sanitized.server_country);
        } catch (const Error&) {
            return std::nullopt;
        }
    };
    std::optional<std::string> location_key;
    if (cfg_.retrieval.prefer_server_location) {
        location_key = server_key();
        if (!location_key) location_key = geo_key();
    } else {
        location_key = geo_key();
        if (!location_key) location_key = server_key();
    }

    std::optional<ContextStats> stats_down, stats_up;
    if (parts_.store && location_key) {
        auto run_query = [&](Direction dir, double current) -> std::optional<ContextStats> {
            RetrievalQuery q;
            q.location_key = *location_key;
            q.hour_local = sanitized.time_of_day_hour;
            q.window_hours = cfg_.retrieval.window_hours;
            q.direction = dir;
            q.limit = cfg_.retrieval.limit;
            try {
                auto records = parts_.store->query_similar(q);
                if (records.empty()) return std::nullopt;
                std::ostringstream descriptor;
                descriptor << "location " << *location_key << ", hour " << q.hour_local
                           << ", window " << q.window_hours << " hours, "
                           << direction_name(dir);
                return compute_stats(records, current, descriptor.str());
            } catch (const Error&) {
                return std::nullopt; // retrieval is enrichment, not a requirement
            }
        };
        stats_down = run_query(Direction::download, sanitized.metrics.download_mbps);
        stats_up = run_query(Direction::upload, sanitized.metrics.upload_mbps);
    }

    std::vector<Assessment> assessments = assess_use_cases(sanitized, cfg_.thresholds);
    InterpretationSummary fallback = fallback_summary(sanitized, assessments, stats_down);

    InterpretationSummary summary;
    bool llm_ok = false;
    if (parts_.llm) {
        bool acquired = false;
        try {
            PromptBundle bundle = build_prompt(
                sanitized, geo_ctx.source != GeoSource::unavailable
                               ? std::optional<GeoContext>(geo_ctx)
                               : std::nullopt,
                stats_down, stats_up, cfg_.prompt.budget_tokens, parts_.system_template);
            if (prompt_observer_) prompt_observer_(bundle);

            if (parts_.gate) {
                if (!parts_.gate->try_acquire()) {
                    fail(Errc::overloaded, "too many interpretation requests in flight");
                }
                acquired = true;
            }
            ChatRequest req;
            req.model = cfg_.llm.model;
            req.messages = {{"system", bundle.system_text}, {"user", bundle.user_text}};
            req.temperature = cfg_.llm.temperature;
            req.max_tokens = cfg_.llm.max_tokens;
            ChatResponse res = parts_.llm->chat_complete(req);
            if (acquired) {
                parts_.gate->release();
                acquired = false;
            }

            // Belt and braces: the prompt is already clean, but the model's
            // text goes through the scrubber too before anyone sees it.
            std::string content = scrub_text(strip_reasoning(res.content)).first;
            ModelOutput parsed = parse_model_output(content);

            summary.llm_used = true;
            if (!res.model_id.empty()) summary.model_id = res.model_id;
            summary.disclaimer = summary_disclaimer();
            summary.overall_text = !parsed.overall.empty() ? parsed.overall
                                                           : fallback.overall_text;
            summary.per_metric = fallback.per_metric;
            for (auto& line : summary.per_metric) {
                if (auto text = match_metric_line(parsed.metric_lines, line.metric)) {
                    line.explanation = *text;
                }
            }
            summary.use_case_impacts = fallback.use_case_impacts;
            for (auto& impact : summary.use_case_impacts) {
                std::string keyword = use_case_keyword(impact.use_case);
                if (auto text = find_line_with(parsed.use_case_lines, {keyword.c_str()}, {})) {
                    impact.text = *text;
                }
            }
            summary.recommendations = parsed.any_labels ? parsed.recommendations
                                                        : fallback.recommendations;
            llm_ok = true;
        } catch (const Error& e) {
            if (acquired) parts_.gate->release();
            if (e.code() == Errc::overloaded) throw;
            // any other failure on this path degrades to the rules fallback
        }
    }
    if (!llm_ok) summary = fallback;

    summary.context.geo_used = geo_used;
    summary.context.peers_down = stats_down ? static_cast<int>(stats_down->n) : 0;
    summary.context.peers_up = stats_up ? static_cast<int>(stats_up->n) : 0;
    summary.context.history_used =
        summary.context.peers_down > 0 || summary.context.peers_up > 0;
    return summary;
}

Pipeline build_pipeline(const PipelineConfig& cfg, bool enable_llm) {
    static HttplibTransport shared_transport;

    PipelineParts parts;
    if (cfg.kb_path.empty()) {
        parts.store = std::make_shared<MemoryStore>();
    } else {
        parts.store = std::make_shared<FileStore>(cfg.kb_path);
    }
    if (!cfg.geo.base_url.empty()) {
        parts.geo = std::make_shared<GeoClient>(shared_transport, cfg.geo);
    }
    if (enable_llm && !cfg.llm.base_url.empty()) {
        LlmOptions options;
        options.base_url = cfg.llm.base_url;
        options.timeout_ms = cfg.llm.timeout_ms;
        parts.llm = std::make_shared<HttpChatClient>(shared_transport, options,
                                                     llm_credential());
        parts.gate = std::make_shared<ConcurrencyGate>(cfg.max_inflight_llm, 2000);
    }
    std::string template_path = cfg.prompt.template_path.empty() ? default_template_path()
                                                                 : cfg.prompt.template_path;
    parts.system_template = load_text_asset(template_path);
    return Pipeline(cfg, std::move(parts));
}

} // namespace netsense
