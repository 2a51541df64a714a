#pragma once

#include "netsense/config.hpp"
#include "netsense/geo.hpp"
#include "netsense/kb.hpp"
#include "netsense/llm.hpp"
#include "netsense/prompt.hpp"
#include "netsense/summary.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace netsense {

// Labeled sections extracted from the model's reply. Lossless: lines that fit
// no label land in overall.
struct ModelOutput {
    std::string overall;
    std::vector<std::string> metric_lines;
    std::vector<std::string> use_case_lines;
    std::vector<std::string> recommendations;
    bool any_labels = false;
};

ModelOutput parse_model_output(const std::string& content);

// Bounds concurrent LLM calls; acquire failure after the queue wait means the
// caller should shed load.
class ConcurrencyGate {
public:
    ConcurrencyGate(int max_inflight, int queue_wait_ms);

    bool try_acquire();
    void release();

private:
    class Impl;
    std::shared_ptr<Impl> impl_;
};

struct PipelineParts {
    std::shared_ptr<KbStorage> store;      // null: retrieval disabled
    std::shared_ptr<GeoClient> geo;        // null: geolocation disabled
    std::shared_ptr<ChatBackend> llm;      // null: rules fallback only
    std::shared_ptr<ConcurrencyGate> gate; // null: unbounded
    std::string system_template;
};

class Pipeline {
public:
    Pipeline(PipelineConfig cfg, PipelineParts parts);

    // Throws only for fatal ingest errors (and Errc::overloaded when the gate
    // sheds load); every enrichment failure degrades instead.
    InterpretationSummary interpret(const std::string& raw_document);

    void set_prompt_observer(std::function<void(const PromptBundle&)> observer);

    const PipelineConfig& config() const { return cfg_; }
    const PipelineParts& parts() const { return parts_; }

private:
    PipelineConfig cfg_;
    PipelineParts parts_;
    std::vector<RedactionRule> rules_;
    std::function<void(const PromptBundle&)> prompt_observer_;
};

// Wires live parts from configuration: file or memory store, HTTP transports,
// template asset, credential from the environment.
Pipeline build_pipeline(const PipelineConfig& cfg, bool enable_llm = true);

} // namespace netsense
