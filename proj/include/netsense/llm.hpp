#pragma once

#include "netsense/errors.hpp"
#include "netsense/transport.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace netsense {

struct ChatMessage {
    std::string role; // system, user, assistant
    std::string content;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 0.2;
    int max_tokens = 1024;
    bool stream = false;
};

enum class FinishReason { stop, length, other };

struct ChatResponse {
    std::string content;
    FinishReason finish_reason = FinishReason::other;
    std::optional<int> prompt_tokens;
    std::optional<int> completion_tokens;
    std::string model_id;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual ChatResponse chat_complete(const ChatRequest& req) = 0;
};

std::string strip_reasoning(const std::string& content);

struct LlmOptions {
    std::string base_url; // empty disables the live client
    int timeout_ms = 30000;
};

// POST <base>/v1/chat/completions with retry on 429/5xx/timeout: 3 attempts,
// base delay 500 ms, full jitter. The credential comes in via the constructor
// (read from the environment by the caller) and goes nowhere but the
// Authorization header.
class HttpChatClient : public ChatBackend {
public:
    using Sleeper = std::function<void(std::int64_t /*ms*/)>;
    using Jitter = std::function<double()>; // uniform [0, 1)

    HttpChatClient(HttpPoster& transport, LlmOptions options,
                   std::optional<std::string> credential, Sleeper sleeper = {},
                   Jitter jitter = {});

    ChatResponse chat_complete(const ChatRequest& req) override;

private:
    HttpPoster& transport_;
    LlmOptions options_;
    std::optional<std::string> credential_;
    Sleeper sleeper_;
    Jitter jitter_;
};

std::uint64_t request_fingerprint(const ChatRequest& req);

// Deterministic stand-in: scripted responses by fingerprint, a fixed default
// for everything else, and optional error injection for failure-path tests.
class MockChatBackend : public ChatBackend {
public:
    MockChatBackend();

    void script(const ChatRequest& req, ChatResponse response);
    void set_default_content(std::string content);
    void fail_with(std::optional<Errc> errc);

    ChatResponse chat_complete(const ChatRequest& req) override;

    int calls() const { return calls_; }

private:
    std::map<std::uint64_t, ChatResponse> scripted_;
    std::string default_content_;
    std::optional<Errc> fail_errc_;
    int calls_ = 0;
};

} // namespace netsense
