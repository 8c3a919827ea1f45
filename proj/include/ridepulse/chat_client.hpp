#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ridepulse/classify.hpp"
#include "ridepulse/errors.hpp"
#include "ridepulse/types.hpp"

namespace ridepulse {

struct ClassifierClientConfig {
    std::string endpoint_url;                  // e.g. http://localhost:8089/v1/chat/completions
    std::string model_name = "gpt-3.5-turbo";
    std::string auth_token_env_var = "RIDEPULSE_API_TOKEN";
    int max_retries = 2;
    int request_timeout_ms = 30000;
    int max_concurrent_requests = 4;
    double temperature = 0.0;
    int retry_backoff_ms = 250;  // doubled per attempt

    void validate() const {
        if (max_retries < 0) throw Error(errc::config_invalid, "max_retries must be >= 0");
        if (max_concurrent_requests < 1)
            throw Error(errc::config_invalid, "max_concurrent_requests must be >= 1");
    }
};

struct TransportResult {
    bool transport_ok = false;  // false: connect/timeout failure, status meaningless
    int status = 0;
    std::string body;
    std::string error;
};

/// Seam between the classifier and the wire; tests script it, production
/// uses the HTTP implementation below.
class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    virtual TransportResult post_chat(const std::string& request_body) = 0;
};

inline nlohmann::json chat_request_body(const ClassifierClientConfig& cfg, const PromptSpec& prompt) {
    nlohmann::json body;
    body["model"] = cfg.model_name;
    body["temperature"] = cfg.temperature;
    body["messages"] = nlohmann::json::array({
        {{"role", "system"}, {"content", prompt.instruction}},
        {{"role", "user"}, {"content", render_prompt(prompt)}},
    });
    return body;
}

/// First choice text of a chat-completion response.
inline std::string extract_choice_text(const std::string& response_body) {
    nlohmann::json j = nlohmann::json::parse(response_body, nullptr, false);
    if (j.is_discarded())
        throw Error(errc::unparsable_label, "response is not JSON");
    try {
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw Error(errc::unparsable_label, "response lacks choices[0].message.content");
    }
}

struct AuditEntry {
    std::string post_id;
    int attempts = 0;
    int last_status = 0;
    std::string raw_response;  // body of the final attempt
    std::string outcome;       // category name, or the error name
};

using SleepFn = std::function<void(std::chrono::milliseconds)>;

inline void default_sleep(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

/// One remote classification with exponential backoff on transient failures
/// (connect errors, 429, 5xx). 401/403 aborts immediately.
inline TopicCategory classify_remote(ChatTransport& transport, const ClassifierClientConfig& cfg,
                                     const PromptSpec& prompt, AuditEntry* audit = nullptr,
                                     const SleepFn& sleep = default_sleep) {
    const std::string body = chat_request_body(cfg, prompt).dump();

    TransportResult last;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0) {
            auto delay = std::chrono::milliseconds(
                static_cast<long long>(cfg.retry_backoff_ms) * (1LL << (attempt - 1)));
            if (delay.count() > 0) sleep(delay);
        }
        last = transport.post_chat(body);
        if (audit) {
            audit->attempts = attempt + 1;
            audit->last_status = last.transport_ok ? last.status : 0;
            audit->raw_response = last.transport_ok ? last.body : last.error;
        }
        if (!last.transport_ok) continue;  // transient: retry
        if (last.status == 401 || last.status == 403)
            throw Error(errc::auth_failure, "endpoint returned " + std::to_string(last.status));
        if (last.status == 429 || last.status >= 500) continue;  // transient: retry
        if (last.status != 200)
            throw Error(errc::endpoint_unreachable,
                        "endpoint returned " + std::to_string(last.status));
        return parse_label(extract_choice_text(last.body));
    }
    if (last.transport_ok && last.status == 429)
        throw Error(errc::rate_limited, "still rate limited after " +
                                            std::to_string(cfg.max_retries + 1) + " attempts");
    throw Error(errc::endpoint_unreachable,
                last.transport_ok ? "status " + std::to_string(last.status)
                                  : (last.error.empty() ? "connection failed" : last.error));
}

/// Scripted transport for replay tests: responses are served in order.
class ScriptedTransport : public ChatTransport {
public:
    explicit ScriptedTransport(std::vector<TransportResult> script) : script_(std::move(script)) {}

    TransportResult post_chat(const std::string& request_body) override {
        std::lock_guard<std::mutex> lock(mu_);
        requests_.push_back(request_body);
        if (next_ >= script_.size()) {
            TransportResult r;
            r.error = "script exhausted";
            return r;
        }
        return script_[next_++];
    }

    const std::vector<std::string>& requests() const { return requests_; }

private:
    std::vector<TransportResult> script_;
    std::size_t next_ = 0;
    std::vector<std::string> requests_;
    std::mutex mu_;
};

inline TransportResult ok_chat_response(const std::string& label) {
    nlohmann::json j;
    j["choices"] = nlohmann::json::array(
        {{{"message", {{"role", "assistant"}, {"content", label}}}}});
    TransportResult r;
    r.transport_ok = true;
    r.status = 200;
    r.body = j.dump();
    return r;
}

} // namespace ridepulse
