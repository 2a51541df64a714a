#pragma once

#include "netsense/sanitize.hpp"
#include "netsense/stats.hpp"
#include "netsense/summary.hpp"

#include <optional>
#include <string>
#include <vector>

namespace netsense {

enum class UseCase { gaming, video_streaming, browsing };

const char* use_case_name(UseCase u);     // machine name
const char* use_case_display(UseCase u);  // audience-facing name

struct UseCaseThresholds {
    UseCase use_case = UseCase::browsing;
    double min_download_mbps = 0.0;
    double min_upload_mbps = 0.0;
    double max_latency_ms = 0.0;
    double max_loss_pct = 0.0;
};

enum class Verdict { good, marginal, poor };

const char* verdict_name(Verdict v);

struct Assessment {
    UseCase use_case = UseCase::browsing;
    Verdict verdict = Verdict::good;
    std::optional<std::string> limiting_metric; // present iff verdict != good
};

// Illustrative, operator-tunable defaults; the numbers are configuration,
// not measured requirements.
std::vector<UseCaseThresholds> default_thresholds();

std::vector<Assessment> assess_use_cases(const SanitizedReport& report,
                                         const std::vector<UseCaseThresholds>& thresholds);

InterpretationSummary fallback_summary(const SanitizedReport& report,
                                       const std::vector<Assessment>& assessments,
                                       const std::optional<ContextStats>& stats_down);

// Shared with the pipeline so both paths describe metrics identically.
std::vector<MetricLine> metric_lines(const Metrics& metrics);
const char* metric_explanation(const std::string& metric);

} // namespace netsense
