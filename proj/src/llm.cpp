#include "netsense/llm.hpp"

#include <chrono>
#include <cmath>
#include <json.hpp>
#include <random>
#include <thread>

namespace netsense {

namespace {

using nlohmann::json;

constexpr int kMaxAttempts = 3;
constexpr double kBaseDelayMs = 500.0;

json request_body(const ChatRequest& req) {
    json messages = json::array();
    for (const auto& m : req.messages) {
        messages.push_back({{"role", m.role}, {"content", m.content}});
    }
    return {{"model", req.model},
            {"messages", messages},
            {"temperature", req.temperature},
            {"max_tokens", req.max_tokens},
            {"stream", req.stream}};
}

ChatResponse parse_response(const std::string& body) {
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        fail(Errc::malformed_response, "completion body is not a structured document");
    }
    auto choices = doc.find("choices");
    if (choices == doc.end() || !choices->is_array() || choices->empty()) {
        fail(Errc::malformed_response, "completion body has no choices");
    }
    const json& first = (*choices)[0];
    if (!first.is_object() || !first.contains("message") ||
        !first["message"].is_object() || !first["message"].contains("content") ||
        !first["message"]["content"].is_string()) {
        fail(Errc::malformed_response, "first choice has no message content");
    }

    ChatResponse res;
    res.content = first["message"]["content"].get<std::string>();
    std::string finish =
        first.contains("finish_reason") && first["finish_reason"].is_string()
            ? first["finish_reason"].get<std::string>()
            : "";
    if (finish == "stop") res.finish_reason = FinishReason::stop;
    else if (finish == "length") res.finish_reason = FinishReason::length;
    else res.finish_reason = FinishReason::other;

    if (doc.contains("model") && doc["model"].is_string()) {
        res.model_id = doc["model"].get<std::string>();
    }
    if (doc.contains("usage") && doc["usage"].is_object()) {
        const json& usage = doc["usage"];
        if (usage.contains("prompt_tokens") && usage["prompt_tokens"].is_number_integer()) {
            res.prompt_tokens = usage["prompt_tokens"].get<int>();
        }
        if (usage.contains("completion_tokens") &&
            usage["completion_tokens"].is_number_integer()) {
            res.completion_tokens = usage["completion_tokens"].get<int>();
        }
    }
    if (res.finish_reason == FinishReason::stop && res.content.empty()) {
        fail(Errc::malformed_response, "stop finish with empty content");
    }
    return res;
}

} // namespace

std::string strip_reasoning(const std::string& content) {
    static const std::string open_tag = "<think>";
    static const std::string close_tag = "</think>";
    std::string out;
    out.reserve(content.size());
    std::size_t pos = 0;
    while (pos < content.size()) {
        std::size_t open = content.find(open_tag, pos);
        if (open == std::string::npos) {
            out.append(content, pos, std::string::npos);
            break;
        }
        out.append(content, pos, open - pos);
        std::size_t close = content.find(close_tag, open + open_tag.size());
        if (close == std::string::npos) break; // unclosed: drop to end
        pos = close + close_tag.size();
    }
    std::size_t b = out.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = out.find_last_not_of(" \t\r\n");
    return out.substr(b, e - b + 1);
}

HttpChatClient::HttpChatClient(HttpPoster& transport, LlmOptions options,
                               std::optional<std::string> credential, Sleeper sleeper,
                               Jitter jitter)
    : transport_(transport), options_(std::move(options)), credential_(std::move(credential)),
      sleeper_(std::move(sleeper)), jitter_(std::move(jitter)) {
    if (!sleeper_) {
        sleeper_ = [](std::int64_t ms) {
            std::this_thread::sleep_for(std::chrono::milliseconds(ms));
        };
    }
    if (!jitter_) {
        jitter_ = [] {
            thread_local std::mt19937_64 rng{std::random_device{}()};
            return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        };
    }
}

ChatResponse HttpChatClient::chat_complete(const ChatRequest& req) {
    std::string url = options_.base_url;
    while (!url.empty() && url.back() == '/') url.pop_back();
    url += "/v1/chat/completions";

    HeaderList headers;
    if (credential_) headers.emplace_back("Authorization", "Bearer " + *credential_);
    std::string body = request_body(req).dump();

    for (int attempt = 0;; ++attempt) {
        auto res = transport_.post(url, body, headers, options_.timeout_ms);
        bool retryable;
        if (res) {
            if (res->status >= 200 && res->status < 300) return parse_response(res->body);
            if (res->status == 401 || res->status == 403) {
                fail(Errc::auth_failure, "endpoint rejected the credential");
            }
            if (res->status >= 400 && res->status < 500 && res->status != 429) {
                fail(Errc::bad_request,
                     "endpoint rejected the request with status " + std::to_string(res->status));
            }
            retryable = res->status == 429 || res->status >= 500;
        } else {
            retryable = true; // transport failure or timeout
        }
        if (!retryable || attempt + 1 >= kMaxAttempts) {
            fail(Errc::exhausted, "completion endpoint kept failing after " +
                                      std::to_string(attempt + 1) + " attempts");
        }
        double delay = jitter_() * kBaseDelayMs * std::pow(2.0, attempt);
        sleeper_(static_cast<std::int64_t>(delay));
    }
}

std::uint64_t request_fingerprint(const ChatRequest& req) {
    // FNV-1a over model and messages, with separators so field boundaries count.
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= 0x1f;
        h *= 1099511628211ull;
    };
    mix(req.model);
    for (const auto& m : req.messages) {
        mix(m.role);
        mix(m.content);
    }
    return h;
}

MockChatBackend::MockChatBackend()
    : default_content_(
          "OVERALL: This connection is healthy and comfortably supports everyday use.\n"
          "METRICS: download = fast enough for large files; upload = fine for calls and "
          "sharing; latency = responsive.\n"
          "USE CASES: online gaming works well. video streaming works well. internet "
          "browsing works well.\n"
          "RECOMMENDATIONS: none needed.") {}

void MockChatBackend::script(const ChatRequest& req, ChatResponse response) {
    scripted_[request_fingerprint(req)] = std::move(response);
}

void MockChatBackend::set_default_content(std::string content) {
    default_content_ = std::move(content);
}

void MockChatBackend::fail_with(std::optional<Errc> errc) { fail_errc_ = errc; }

ChatResponse MockChatBackend::chat_complete(const ChatRequest& req) {
    ++calls_;
    if (fail_errc_) fail(*fail_errc_, "scripted failure");
    auto it = scripted_.find(request_fingerprint(req));
    if (it != scripted_.end()) return it->second;
    ChatResponse res;
    res.content = default_content_;
    res.finish_reason = FinishReason::stop;
    res.model_id = "mock";
    return res;
}

} // namespace netsense
