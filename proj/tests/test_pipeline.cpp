#include "netsense/pipeline.hpp"

#include "netsense/errors.hpp"
#include "netsense/sanitize.hpp"
#include "support/fuzz.hpp"
#include "support/leakcheck.hpp"
#include "support/oracle.hpp"

#include <doctest.h>
#include <json.hpp>

#include <chrono>
#include <deque>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace netsense;
namespace nt = netsense::testing;
using nlohmann::json;

namespace {

const std::string kSystemTemplate =
    "You explain speed tests in plain language.\n{{output_format}}\n";

const std::string kGeoKey = "santa barbara|california|us";
const std::string kServerKey = "santa barbara, ca||united states";

std::string fixture_text() {
    std::ifstream in(std::string(NETSENSE_TEST_DIR) + "/fixtures/ookla_result.json",
                     std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json fixture_json() { return json::parse(fixture_text()); }

std::string doc_with_external_ip(const std::string& ip) {
    json doc = fixture_json();
    doc["interface"]["externalIp"] = ip;
    return doc.dump();
}

class StubGetter : public HttpGetter {
public:
    std::deque<std::optional<HttpResponse>> responses;
    int calls = 0;

    std::optional<HttpResponse> get(const std::string&, int) override {
        ++calls;
        if (responses.empty()) return std::nullopt;
        auto next = responses.front();
        responses.pop_front();
        return next;
    }
};

std::string geo_body() {
    json body;
    body["country"] = "US";
    body["region"] = "California";
    body["city"] = "Santa Barbara";
    body["lat"] = 34.4208;
    body["lon"] = -119.6982;
    return body.dump();
}

std::shared_ptr<GeoClient> make_geo(StubGetter& getter) {
    GeoOptions options;
    options.base_url = "http://geo.test";
    options.timeout_ms = 100;
    options.ttl_seconds = 3600;
    return std::make_shared<GeoClient>(getter, options);
}

HistoricalRecord make_record(const std::string& key, Direction dir, double mbps,
                             std::int64_t measured) {
    HistoricalRecord r;
    r.unit_pseudonym = "unit-1";
    r.location_key = key;
    r.direction = dir;
    r.measured_at_utc = measured;
    r.hour_local = 3; // the fixture timestamp lands at local hour 3 under -480
    r.throughput_mbps = mbps;
    return r;
}

void seed_store(MemoryStore& store, const std::string& key) {
    store.append_all({
        make_record(key, Direction::download, 10.0, 1000),
        make_record(key, Direction::download, 20.0, 2000),
        make_record(key, Direction::download, 30.0, 3000),
        make_record(key, Direction::upload, 5.0, 1500),
        make_record(key, Direction::upload, 6.0, 2500),
    });
}

PipelineConfig test_config() {
    PipelineConfig cfg;
    cfg.utc_offset_minutes = -480;
    cfg.retrieval.window_hours = 2;
    cfg.retrieval.limit = 200;
    cfg.prompt.budget_tokens = 100000;
    cfg.llm.model = "test-model";
    return cfg;
}

const char* kModelReply =
    "OVERALL: Everything looks healthy for daily use.\n"
    "METRICS:\n"
    "- The download speed is very fast\n"
    "- The upload speed is decent\n"
    "- The idle latency is low\n"
    "- The jitter is small\n"
    "- The latency under download load is moderate\n"
    "- The latency under upload load is moderate\n"
    "- The packet loss is zero\n"
    "USE CASES:\n"
    "- Online gaming should feel responsive\n"
    "- Video streaming will be smooth\n"
    "- Everyday browsing is effortless\n"
    "RECOMMENDATIONS:\n"
    "- No changes needed\n";

template <typename F>
Errc code_of(F&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return Errc::config_error;
}

} // namespace

TEST_CASE("parse_model_output splits fully labeled content") {
    ModelOutput out = parse_model_output(kModelReply);
    CHECK(out.any_labels);
    CHECK(out.overall == "Everything looks healthy for daily use.");
    REQUIRE(out.metric_lines.size() == 7);
    CHECK(out.metric_lines.front() == "The download speed is very fast");
    CHECK(out.metric_lines.back() == "The packet loss is zero");
    REQUIRE(out.use_case_lines.size() == 3);
    CHECK(out.use_case_lines[1] == "Video streaming will be smooth");
    REQUIRE(out.recommendations.size() == 1);
    CHECK(out.recommendations[0] == "No changes needed");
}

TEST_CASE("parse_model_output accepts label spelling variants") {
    ModelOutput out = parse_model_output("overall: fine\n"
                                         "Use-Cases:\n"
                                         "- gaming works\n"
                                         "use_cases:\n"
                                         "- streaming works\n"
                                         "- RECOMMENDATIONS: use a cable\n"
                                         "METRICS : spaced colon content\n");
    CHECK(out.any_labels);
    CHECK(out.overall == "fine");
    REQUIRE(out.use_case_lines.size() == 2);
    CHECK(out.use_case_lines[0] == "gaming works");
    CHECK(out.use_case_lines[1] == "streaming works");
    REQUIRE(out.recommendations.size() == 1);
    CHECK(out.recommendations[0] == "use a cable");
    REQUIRE(out.metric_lines.size() == 1);
    CHECK(out.metric_lines[0] == "spaced colon content");
}

TEST_CASE("parse_model_output rejects near-miss labels") {
    ModelOutput out = parse_model_output("OVERALLY: not a label\n"
                                         "METRICS ARE GREAT: still prose\n"
                                         "The metrics look fine\n");
    CHECK_FALSE(out.any_labels);
    CHECK(out.metric_lines.empty());
    CHECK(out.overall ==
          "OVERALLY: not a label METRICS ARE GREAT: still prose The metrics look fine");
}

TEST_CASE("parse_model_output keeps unlabeled prose as overall") {
    ModelOutput out = parse_model_output("The link is solid.\n\nNo concerns today.\n");
    CHECK_FALSE(out.any_labels);
    CHECK(out.overall == "The link is solid. No concerns today.");
    CHECK(out.metric_lines.empty());
    CHECK(out.use_case_lines.empty());
    CHECK(out.recommendations.empty());
}

TEST_CASE("parse_model_output leaves a labeled empty section empty") {
    ModelOutput out = parse_model_output("OVERALL: all good\nRECOMMENDATIONS:\n");
    CHECK(out.any_labels);
    CHECK(out.overall == "all good");
    CHECK(out.recommendations.empty());
}

TEST_CASE("parse_model_output strips bullets in sections but not in overall") {
    ModelOutput out = parse_model_output("OVERALL:\n"
                                         "- dashes stay in overall prose\n"
                                         "METRICS:\n"
                                         "  - indented dash\n"
                                         "* starred\n"
                                         "> quoted\n");
    CHECK(out.overall == "- dashes stay in overall prose");
    REQUIRE(out.metric_lines.size() == 3);
    CHECK(out.metric_lines[0] == "indented dash");
    CHECK(out.metric_lines[1] == "starred");
    CHECK(out.metric_lines[2] == "quoted");
}

TEST_CASE("parse_model_output appends on repeated labels and loses nothing") {
    ModelOutput out = parse_model_output("intro line\n"
                                         "METRICS:\n"
                                         "- first\n"
                                         "USE CASES:\n"
                                         "- middle\n"
                                         "METRICS:\n"
                                         "- second\n");
    CHECK(out.overall == "intro line");
    REQUIRE(out.metric_lines.size() == 2);
    CHECK(out.metric_lines[0] == "first");
    CHECK(out.metric_lines[1] == "second");
    REQUIRE(out.use_case_lines.size() == 1);

    std::size_t captured = out.metric_lines.size() + out.use_case_lines.size() +
                           out.recommendations.size() + 1;
    CHECK(captured == 4); // four content-bearing lines in, four accounted for
}

TEST_CASE("pipeline full path uses every enrichment") {
    StubGetter getter;
    getter.responses.push_back(HttpResponse{200, geo_body()});
    auto geo = make_geo(getter);
    auto store = std::make_shared<MemoryStore>();
    seed_store(*store, kGeoKey);
    auto mock = std::make_shared<MockChatBackend>();
    mock->set_default_content(kModelReply);

    PipelineParts parts;
    parts.store = store;
    parts.geo = geo;
    parts.llm = mock;
    parts.system_template = kSystemTemplate;
    Pipeline pipeline(test_config(), parts);

    PromptBundle seen;
    bool observed = false;
    pipeline.set_prompt_observer([&](const PromptBundle& b) {
        seen = b;
        observed = true;
    });

    InterpretationSummary summary = pipeline.interpret(doc_with_external_ip("11.22.33.44"));

    CHECK(summary.llm_used);
    REQUIRE(summary.model_id.has_value());
    CHECK(*summary.model_id == "mock");
    CHECK(summary.overall_text == "Everything looks healthy for daily use.");
    CHECK(summary.disclaimer == std::string(summary_disclaimer()));
    CHECK(summary.context.geo_used);
    CHECK(summary.context.history_used);
    CHECK(summary.context.peers_down == 3);
    CHECK(summary.context.peers_up == 2);
    REQUIRE(summary.recommendations.size() == 1);
    CHECK(summary.recommendations[0] == "No changes needed");

    REQUIRE(summary.per_metric.size() == 7);
    for (const auto& line : summary.per_metric) {
        if (line.metric == "download") {
            CHECK(line.explanation == "The download speed is very fast");
        } else if (line.metric == "upload") {
            CHECK(line.explanation == "The upload speed is decent");
        } else if (line.metric == "latency_idle") {
            CHECK(line.explanation == "The idle latency is low");
        } else if (line.metric == "jitter") {
            CHECK(line.explanation == "The jitter is small");
        } else if (line.metric == "latency_dl_loaded") {
            CHECK(line.explanation == "The latency under download load is moderate");
        } else if (line.metric == "latency_ul_loaded") {
            CHECK(line.explanation == "The latency under upload load is moderate");
        } else if (line.metric == "packet_loss") {
            CHECK(line.explanation == "The packet loss is zero");
        } else {
            FAIL("unexpected metric name: " << line.metric);
        }
    }

    REQUIRE(summary.use_case_impacts.size() == 3);
    for (const auto& impact : summary.use_case_impacts) {
        if (impact.use_case == "online gaming") {
            CHECK(impact.text == "Online gaming should feel responsive");
        } else if (impact.use_case == "video streaming") {
            CHECK(impact.text == "Video streaming will be smooth");
        } else if (impact.use_case == "internet browsing") {
            CHECK(impact.text == "Everyday browsing is effortless");
        } else {
            FAIL("unexpected use case: " << impact.use_case);
        }
    }

    CHECK(observed);
    CHECK(seen.sections_included.size() == 4);
    CHECK(seen.user_text.find("## Approximate client location") != std::string::npos);
    CHECK(seen.user_text.find(
              "location santa barbara|california|us, hour 3, window 2 hours, download") !=
          std::string::npos);
    CHECK(getter.calls == 1);
    CHECK(mock->calls() == 1);
}

TEST_CASE("pipeline never contacts the geo provider for a private address") {
    StubGetter getter;
    auto mock = std::make_shared<MockChatBackend>();

    PipelineParts parts;
    parts.store = std::make_shared<MemoryStore>();
    parts.geo = make_geo(getter);
    parts.llm = mock;
    parts.system_template = kSystemTemplate;
    Pipeline pipeline(test_config(), parts);

    json doc = fixture_json(); // externalIp 203.0.113.54 is not publicly routable
    doc["server"].erase("location");
    doc["server"].erase("country");
    PromptBundle seen;
    pipeline.set_prompt_observer([&](const PromptBundle& b) { seen = b; });
    InterpretationSummary summary = pipeline.interpret(doc.dump());

    CHECK(getter.calls == 0);
    CHECK_FALSE(summary.context.geo_used);
    CHECK_FALSE(summary.context.history_used);
    CHECK(summary.context.peers_down == 0);
    CHECK(summary.llm_used);
    REQUIRE(seen.sections_included.size() == 1);
    CHECK(seen.sections_included.count(PromptSection::metrics) == 1);
}

TEST_CASE("pipeline skips geolocation when the document has no external ip") {
    StubGetter getter;
    getter.responses.push_back(HttpResponse{200, geo_body()});

    PipelineParts parts;
    parts.store = std::make_shared<MemoryStore>();
    parts.geo = make_geo(getter);
    parts.llm = std::make_shared<MockChatBackend>();
    parts.system_template = kSystemTemplate;
    Pipeline pipeline(test_config(), parts);

    json doc = fixture_json();
    doc["interface"].erase("externalIp");
    InterpretationSummary summary = pipeline.interpret(doc.dump());

    CHECK(getter.calls == 0);
    CHECK_FALSE(summary.context.geo_used);
}

TEST_CASE("pipeline location precedence follows configuration") {
    const std::string doc = doc_with_external_ip("11.22.33.44");

    auto run = [&](bool prefer_server, bool geo_up, const std::string& seeded_key) {
        StubGetter getter;
        if (geo_up) getter.responses.push_back(HttpResponse{200, geo_body()});
        auto store = std::make_shared<MemoryStore>();
        seed_store(*store, seeded_key);

        PipelineParts parts;
        parts.store = store;
        parts.geo = make_geo(getter);
        parts.system_template = kSystemTemplate;
        PipelineConfig cfg = test_config();
        cfg.retrieval.prefer_server_location = prefer_server;
        Pipeline pipeline(cfg, parts);
        return pipeline.interpret(doc);
    };

    SUBCASE("geo key wins by default even when its shelf is empty") {
        InterpretationSummary summary = run(false, true, kServerKey);
        CHECK(summary.context.geo_used);
        CHECK(summary.context.peers_down == 0);
        CHECK_FALSE(summary.context.history_used);
    }
    SUBCASE("server preference reads the server shelf") {
        InterpretationSummary summary = run(true, true, kServerKey);
        CHECK(summary.context.peers_down == 3);
        CHECK(summary.context.history_used);
    }
    SUBCASE("geo failure falls back to the server location") {
        InterpretationSummary summary = run(false, false, kServerKey);
        CHECK_FALSE(summary.context.geo_used);
        CHECK(summary.context.peers_down == 3);
        CHECK(summary.context.history_used);
    }
    SUBCASE("geo key is used when preferred and reachable") {
        InterpretationSummary summary = run(false, true, kGeoKey);
        CHECK(summary.context.geo_used);
        CHECK(summary.context.peers_down == 3);
    }
}

TEST_CASE("pipeline falls back to rules when the model fails") {
    const std::string doc = doc_with_external_ip("11.22.33.44");

    auto build = [&](StubGetter& getter, std::shared_ptr<ChatBackend> llm) {
        getter.responses.push_back(HttpResponse{200, geo_body()});
        auto store = std::make_shared<MemoryStore>();
        seed_store(*store, kGeoKey);
        PipelineParts parts;
        parts.store = store;
        parts.geo = make_geo(getter);
        parts.llm = std::move(llm);
        parts.system_template = kSystemTemplate;
        return Pipeline(test_config(), parts);
    };

    auto failing = std::make_shared<MockChatBackend>();
    failing->fail_with(Errc::exhausted);
    StubGetter getter_a;
    Pipeline with_llm = build(getter_a, failing);
    InterpretationSummary degraded = with_llm.interpret(doc);

    StubGetter getter_b;
    Pipeline without_llm = build(getter_b, nullptr);
    InterpretationSummary rules_only = without_llm.interpret(doc);

    CHECK_FALSE(degraded.llm_used);
    CHECK_FALSE(degraded.model_id.has_value());
    CHECK(degraded.context.geo_used);
    CHECK(degraded.context.peers_down == 3);
    CHECK(failing->calls() == 1);
    CHECK(summary_to_json(degraded).dump() == summary_to_json(rules_only).dump());
}

TEST_CASE("pipeline propagates overload and releases the gate afterwards") {
    const std::string doc = doc_with_external_ip("11.22.33.44");
    StubGetter getter;
    getter.responses.push_back(HttpResponse{200, geo_body()});
    auto mock = std::make_shared<MockChatBackend>();
    auto gate = std::make_shared<ConcurrencyGate>(1, 20);

    PipelineParts parts;
    parts.store = std::make_shared<MemoryStore>();
    parts.geo = make_geo(getter);
    parts.llm = mock;
    parts.gate = gate;
    parts.system_template = kSystemTemplate;
    Pipeline pipeline(test_config(), parts);

    REQUIRE(gate->try_acquire()); // an outside holder saturates the gate
    CHECK(code_of([&] { pipeline.interpret(doc); }) == Errc::overloaded);
    CHECK(mock->calls() == 0);

    gate->release();
    InterpretationSummary first = pipeline.interpret(doc);
    CHECK(first.llm_used);
    CHECK(mock->calls() == 1);

    InterpretationSummary second = pipeline.interpret(doc); // slot was given back
    CHECK(second.llm_used);
    CHECK(mock->calls() == 2);
}

TEST_CASE("pipeline degrades through every part combination") {
    const std::string doc = doc_with_external_ip("11.22.33.44");

    for (bool geo_ok : {false, true}) {
        for (bool kb_filled : {false, true}) {
            for (bool llm_ok : {false, true}) {
                CAPTURE(geo_ok);
                CAPTURE(kb_filled);
                CAPTURE(llm_ok);

                StubGetter getter;
                if (geo_ok) {
                    getter.responses.push_back(HttpResponse{200, geo_body()});
                } else {
                    getter.responses.push_back(std::nullopt); // provider timeout
                }
                auto store = std::make_shared<MemoryStore>();
                if (kb_filled) {
                    seed_store(*store, kGeoKey);
                    seed_store(*store, kServerKey);
                }
                auto mock = std::make_shared<MockChatBackend>();
                if (!llm_ok) mock->fail_with(Errc::exhausted);

                PipelineParts parts;
                parts.store = store;
                parts.geo = make_geo(getter);
                parts.llm = mock;
                parts.system_template = kSystemTemplate;
                Pipeline pipeline(test_config(), parts);

                InterpretationSummary summary;
                REQUIRE_NOTHROW(summary = pipeline.interpret(doc));

                CHECK(summary.context.geo_used == geo_ok);
                CHECK(summary.context.history_used == kb_filled);
                CHECK(summary.context.peers_down == (kb_filled ? 3 : 0));
                CHECK(summary.context.peers_up == (kb_filled ? 2 : 0));
                CHECK(summary.llm_used == llm_ok);
                CHECK_FALSE(summary.overall_text.empty());
                CHECK(summary.per_metric.size() == 7);
                CHECK(summary.use_case_impacts.size() == 3);
                CHECK_FALSE(summary.disclaimer.empty());
            }
        }
    }
}

TEST_CASE("pipeline output is deterministic and the geo cache is reused") {
    const std::string doc = doc_with_external_ip("11.22.33.44");
    StubGetter getter;
    getter.responses.push_back(HttpResponse{200, geo_body()});
    auto store = std::make_shared<MemoryStore>();
    seed_store(*store, kGeoKey);
    auto mock = std::make_shared<MockChatBackend>();
    mock->set_default_content(kModelReply);

    PipelineParts parts;
    parts.store = store;
    parts.geo = make_geo(getter);
    parts.llm = mock;
    parts.system_template = kSystemTemplate;
    Pipeline pipeline(test_config(), parts);

    std::string first = summary_to_json(pipeline.interpret(doc)).dump();
    std::string second = summary_to_json(pipeline.interpret(doc)).dump();
    CHECK(first == second);
    CHECK(getter.calls == 1); // the second run is served from cache
}

TEST_CASE("pipeline scrubs identifiers out of the model reply") {
    StubGetter getter;
    auto mock = std::make_shared<MockChatBackend>();
    mock->set_default_content(
        "OVERALL: Your router at 192.168.0.1 publishes results at "
        "https://results.example.net/r/1\n"
        "RECOMMENDATIONS:\n"
        "- Check adapter aa:bb:cc:dd:ee:ff for duplex problems\n");

    PipelineParts parts;
    parts.store = std::make_shared<MemoryStore>();
    parts.geo = make_geo(getter);
    parts.llm = mock;
    parts.system_template = kSystemTemplate;
    Pipeline pipeline(test_config(), parts);

    InterpretationSummary summary = pipeline.interpret(fixture_text());
    std::string dumped = summary_to_json(summary).dump();
    auto leaks = nt::find_leaks(dumped);
    CAPTURE(leaks);
    CHECK(leaks.empty());
    CHECK(summary.overall_text.find("[REDACTED:ipv4]") != std::string::npos);
    CHECK(summary.overall_text.find("[REDACTED:url]") != std::string::npos);
    REQUIRE(summary.recommendations.size() == 1);
    CHECK(summary.recommendations[0].find("[REDACTED:mac]") != std::string::npos);
}

TEST_CASE("pipeline drops reasoning markup before parsing the reply") {
    StubGetter getter;
    auto mock = std::make_shared<MockChatBackend>();
    mock->set_default_content(
        "<think>weigh the numbers carefully first</think>OVERALL: All good here.\n");

    PipelineParts parts;
    parts.store = std::make_shared<MemoryStore>();
    parts.geo = make_geo(getter);
    parts.llm = mock;
    parts.system_template = kSystemTemplate;
    Pipeline pipeline(test_config(), parts);

    InterpretationSummary summary = pipeline.interpret(fixture_text());
    CHECK(summary.llm_used);
    CHECK(summary.overall_text == "All good here.");
    CHECK(summary.overall_text.find("weigh") == std::string::npos);
}

TEST_CASE("pipeline keeps rule recommendations for an unlabeled reply") {
    json doc = fixture_json();
    doc["download"]["bandwidth"] = 250000; // 2 Mbps: every use case suffers
    const std::string raw = doc.dump();

    auto build = [&](std::shared_ptr<ChatBackend> llm) {
        PipelineParts parts; // geo disabled: no client at all
        parts.store = std::make_shared<MemoryStore>();
        parts.llm = std::move(llm);
        parts.system_template = kSystemTemplate;
        return Pipeline(test_config(), parts);
    };

    Pipeline rules_only = build(nullptr);
    InterpretationSummary fallback = rules_only.interpret(raw);
    REQUIRE_FALSE(fallback.recommendations.empty());

    auto mock = std::make_shared<MockChatBackend>();
    mock->set_default_content("A middling connection. Expect some buffering tonight.");
    Pipeline with_llm = build(mock);
    InterpretationSummary summary = with_llm.interpret(raw);

    CHECK(summary.llm_used);
    CHECK(summary.overall_text == "A middling connection. Expect some buffering tonight.");
    CHECK(summary.recommendations == fallback.recommendations);
    REQUIRE(summary.per_metric.size() == fallback.per_metric.size());
    for (std::size_t i = 0; i < summary.per_metric.size(); ++i) {
        CHECK(summary.per_metric[i].explanation == fallback.per_metric[i].explanation);
    }
}

TEST_CASE("pipeline empties recommendations when the label section is empty") {
    json doc = fixture_json();
    doc["download"]["bandwidth"] = 250000;
    auto mock = std::make_shared<MockChatBackend>();
    mock->set_default_content("OVERALL: Lacking headroom.\nRECOMMENDATIONS:\n");

    PipelineParts parts;
    parts.store = std::make_shared<MemoryStore>();
    parts.llm = mock;
    parts.system_template = kSystemTemplate;
    Pipeline pipeline(test_config(), parts);

    InterpretationSummary summary = pipeline.interpret(doc.dump());
    CHECK(summary.llm_used);
    CHECK(summary.recommendations.empty());
}

TEST_CASE("pipeline keeps fallback text when no model line names a use case") {
    auto mock = std::make_shared<MockChatBackend>();
    mock->set_default_content("OVERALL: fine\nUSE CASES:\n- Everything is great\n");

    PipelineParts parts;
    parts.store = std::make_shared<MemoryStore>();
    parts.llm = mock;
    parts.system_template = kSystemTemplate;
    Pipeline pipeline(test_config(), parts);

    InterpretationSummary summary = pipeline.interpret(fixture_text());
    REQUIRE(summary.use_case_impacts.size() == 3);
    for (const auto& impact : summary.use_case_impacts) {
        CHECK(impact.text.rfind("Works well.", 0) == 0);
    }
}

TEST_CASE("pipeline rethrows only fatal input errors") {
    auto mock = std::make_shared<MockChatBackend>();
    PipelineParts parts;
    parts.store = std::make_shared<MemoryStore>();
    parts.llm = mock;
    parts.system_template = kSystemTemplate;
    Pipeline pipeline(test_config(), parts);

    CHECK(code_of([&] { pipeline.interpret("not json"); }) == Errc::malformed_document);

    json doc = fixture_json();
    doc["download"].erase("bandwidth");
    CHECK(code_of([&] { pipeline.interpret(doc.dump()); }) == Errc::missing_required_field);

    doc = fixture_json();
    doc["packetLoss"] = 150.0;
    CHECK(code_of([&] { pipeline.interpret(doc.dump()); }) == Errc::range_violation);

    CHECK(mock->calls() == 0);
}

TEST_CASE("pipeline summaries stay clean across tainted documents") {
    nt::Rng rng(20240302);
    auto mock = std::make_shared<MockChatBackend>();
    mock->set_default_content(kModelReply);

    PipelineParts parts;
    parts.store = std::make_shared<MemoryStore>();
    parts.llm = mock;
    parts.system_template = kSystemTemplate;
    Pipeline pipeline(test_config(), parts);

    std::vector<PromptBundle> bundles;
    pipeline.set_prompt_observer([&](const PromptBundle& b) { bundles.push_back(b); });

    int interpreted = 0;
    for (int i = 0; i < 150; ++i) {
        json doc = nt::random_report_json(rng, true);
        InterpretationSummary summary;
        try {
            summary = pipeline.interpret(doc.dump());
        } catch (const Error&) {
            continue; // some generated documents are deliberately broken
        }
        ++interpreted;
        std::string dumped = summary_to_json(summary).dump();
        auto leaks = nt::find_leaks(dumped);
        if (!leaks.empty()) {
            CAPTURE(dumped);
            CAPTURE(leaks);
            FAIL("identifier leaked into a summary");
        }
    }
    CHECK(interpreted > 100);
    CHECK(bundles.size() == static_cast<std::size_t>(interpreted));
    for (const auto& bundle : bundles) {
        auto sys_leaks = nt::find_leaks(bundle.system_text);
        auto user_leaks = nt::find_leaks(bundle.user_text);
        CHECK(sys_leaks.empty());
        CHECK(user_leaks.empty());
    }
}

TEST_CASE("concurrency gate bounds inflight work") {
    ConcurrencyGate gate(2, 30);
    CHECK(gate.try_acquire());
    CHECK(gate.try_acquire());

    auto start = std::chrono::steady_clock::now();
    CHECK_FALSE(gate.try_acquire());
    auto waited = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    CHECK(waited >= 25);

    gate.release();
    CHECK(gate.try_acquire());
}

TEST_CASE("concurrency gate wakes a waiter on release") {
    ConcurrencyGate gate(1, 5000);
    REQUIRE(gate.try_acquire());

    std::thread holder([&gate] {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        gate.release();
    });
    auto start = std::chrono::steady_clock::now();
    bool acquired = gate.try_acquire();
    auto waited = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    holder.join();

    CHECK(acquired);
    CHECK(waited < 3000); // woken by the release, not by the deadline
}

TEST_CASE("build_pipeline wires parts from configuration") {
    PipelineConfig cfg;
    Pipeline plain = build_pipeline(cfg, false);
    CHECK(plain.parts().store != nullptr);
    CHECK(plain.parts().geo == nullptr);
    CHECK(plain.parts().llm == nullptr);
    CHECK(plain.parts().gate == nullptr);
    CHECK_FALSE(plain.parts().system_template.empty());

    PipelineConfig live = cfg;
    live.geo.base_url = "http://127.0.0.1:1";
    live.llm.base_url = "http://127.0.0.1:1";
    Pipeline wired = build_pipeline(live, true);
    CHECK(wired.parts().geo != nullptr);
    CHECK(wired.parts().llm != nullptr);
    CHECK(wired.parts().gate != nullptr);

    Pipeline muted = build_pipeline(live, false);
    CHECK(muted.parts().llm == nullptr);
    CHECK(muted.parts().gate == nullptr);
}

TEST_CASE("build_pipeline uses a durable store when a path is configured") {
    nt::TempDir dir;
    PipelineConfig cfg;
    cfg.kb_path = dir.file("kb.jsonl");

    Pipeline writer = build_pipeline(cfg, false);
    writer.parts().store->append_all({make_record(kGeoKey, Direction::download, 42.0, 7000)});

    Pipeline reader = build_pipeline(cfg, false);
    CHECK(reader.parts().store->record_count() == 1);
}
