#pragma once

// Kept out of chat_client.hpp so unit tests build without the HTTP stack.

#include <cstdlib>
#include <memory>
#include <string>

#include <httplib.h>

#include "ridepulse/chat_client.hpp"
#include "ridepulse/errors.hpp"

namespace ridepulse {

/// HTTP POST of a chat-completion request; bearer token read from the
/// configured environment variable at construction.
class HttpChatTransport : public ChatTransport {
public:
    explicit HttpChatTransport(const ClassifierClientConfig& cfg) {
        split_url(cfg.endpoint_url, base_, path_);
        client_ = std::make_unique<httplib::Client>(base_);
        client_->set_connection_timeout(cfg.request_timeout_ms / 1000,
                                        (cfg.request_timeout_ms % 1000) * 1000);
        client_->set_read_timeout(cfg.request_timeout_ms / 1000,
                                  (cfg.request_timeout_ms % 1000) * 1000);
        if (!cfg.auth_token_env_var.empty()) {
            const char* token = std::getenv(cfg.auth_token_env_var.c_str());
            if (!token || !*token)
                throw Error(errc::auth_failure,
                            "environment variable " + cfg.auth_token_env_var + " is not set");
            client_->set_default_headers({{"Authorization", std::string("Bearer ") + token}});
        }
    }

    TransportResult post_chat(const std::string& request_body) override {
        TransportResult out;
        auto res = client_->Post(path_, request_body, "application/json");
        if (!res) {
            out.error = httplib::to_string(res.error());
            return out;
        }
        out.transport_ok = true;
        out.status = res->status;
        out.body = res->body;
        return out;
    }

private:
    static void split_url(const std::string& url, std::string& base, std::string& path) {
        auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos)
            throw Error(errc::config_invalid, "endpoint_url must include a scheme: " + url);
        auto path_start = url.find('/', scheme_end + 3);
        if (path_start == std::string::npos) {
            base = url;
            path = "/";
        } else {
            base = url.substr(0, path_start);
            path = url.substr(path_start);
        }
    }

    std::string base_;
    std::string path_;
    std::unique_ptr<httplib::Client> client_;
};

} // namespace ridepulse
