#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ridepulse/chat_client.hpp"
#include "ridepulse/classify.hpp"
#include "ridepulse/errors.hpp"
#include "ridepulse/io.hpp"
#include "ridepulse/types.hpp"

namespace ridepulse {

enum class ClassifyMode { Remote, Local };

struct BatchItemError {
    std::string post_id;
    std::string message;
};

struct BatchResult {
    std::vector<LabeledPost> labeled;          // input order; failures carry nullopt category
    std::map<std::string, std::size_t> histogram;  // category name (or "Unlabeled") -> count
    std::vector<BatchItemError> errors;
    std::vector<AuditEntry> audit;             // input order, remote mode only
};

namespace batch_detail {

// index-addressed parallel map; output order never depends on scheduling
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (n == 0) return;
    unsigned workers = threads == 0 ? 1 : threads;
    if (workers == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace batch_detail

/// One label per post, emitted in input order. Remote items that still fail
/// after retries are marked Unlabeled, never dropped.
inline BatchResult classify_batch(const std::vector<ScoredPost>& posts, ClassifyMode mode,
                                  const std::vector<FewShotExemplar>& pool, int k,
                                  ChatTransport* transport = nullptr,
                                  const ClassifierClientConfig* client_cfg = nullptr,
                                  const SleepFn& sleep = default_sleep) {
    BatchResult result;
    result.labeled.resize(posts.size());

    if (mode == ClassifyMode::Remote) {
        if (!transport || !client_cfg)
            throw Error(errc::config_invalid, "remote mode requires a transport and client config");
        client_cfg->validate();
        result.audit.resize(posts.size());
        std::mutex err_mu;

        batch_detail::parallel_for(
            posts.size(), static_cast<unsigned>(client_cfg->max_concurrent_requests),
            [&](std::size_t i) {
                LabeledPost lp;
                lp.post = posts[i].post;
                lp.sentiment = posts[i].sentiment;
                AuditEntry& audit = result.audit[i];
                audit.post_id = posts[i].post.id;
                try {
                    PromptSpec prompt = build_prompt(pool, posts[i].post.text, k);
                    lp.category = classify_remote(*transport, *client_cfg, prompt, &audit, sleep);
                    audit.outcome = category_name(*lp.category);
                } catch (const Error& e) {
                    audit.outcome = e.what();
                    std::lock_guard<std::mutex> lock(err_mu);
                    result.errors.push_back({posts[i].post.id, e.what()});
                }
                result.labeled[i] = std::move(lp);
            });
    } else {
        for (TopicCategory c : kAllCategories) {
            std::size_t have = 0;
            for (const auto& ex : pool)
                if (ex.category == c) ++have;
            if (have == 0)
                throw Error(errc::insufficient_exemplars, category_name(c));
        }
        batch_detail::parallel_for(posts.size(), std::thread::hardware_concurrency(),
                                   [&](std::size_t i) {
                                       LabeledPost lp;
                                       lp.post = posts[i].post;
                                       lp.sentiment = posts[i].sentiment;
                                       lp.category = classify_local(posts[i].post.text, pool);
                                       result.labeled[i] = std::move(lp);
                                   });
    }

    for (const auto& lp : result.labeled) {
        const std::string key = lp.category ? category_name(*lp.category) : "Unlabeled";
        ++result.histogram[key];
    }
    return result;
}

inline void write_audit_log(const std::vector<AuditEntry>& audit, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(errc::file_unreadable, "cannot write " + path);
    for (const auto& a : audit) {
        json j;
        j["post_id"] = a.post_id;
        j["attempts"] = a.attempts;
        j["last_status"] = a.last_status;
        j["raw_response"] = a.raw_response;
        j["outcome"] = a.outcome;
        out << j.dump() << '\n';
    }
}

} // namespace ridepulse
