#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <httplib.h>
#include <json.hpp>

#include "offsetsim/agents.hpp"
#include "offsetsim/errors.hpp"

namespace offsetsim {

using nlohmann::json;

namespace {

const char* env_or(const char* primary, const char* fallback) {
    if (const char* v = std::getenv(primary); v && *v) return v;
    if (const char* v = std::getenv(fallback); v && *v) return v;
    return nullptr;
}

bool is_transient_status(int status) {
    return status == 429 || (status >= 500 && status < 600);
}

struct TokenBucket {
    double rps = 0.0;
    double tokens = 0.0;
    std::chrono::steady_clock::time_point last = std::chrono::steady_clock::now();
    std::mutex m;

    void acquire() {
        if (rps <= 0.0) return;
        std::unique_lock lock(m);
        for (;;) {
            const auto now = std::chrono::steady_clock::now();
            const double elapsed = std::chrono::duration<double>(now - last).count();
            last = now;
            tokens = std::min(rps, tokens + elapsed * rps);
            if (tokens >= 1.0) {
                tokens -= 1.0;
                return;
            }
            const double wait_s = (1.0 - tokens) / rps;
            lock.unlock();
            std::this_thread::sleep_for(std::chrono::duration<double>(wait_s));
            lock.lock();
        }
    }
};

struct ConcurrencyGate {
    int limit = 0;
    int active = 0;
    std::mutex m;
    std::condition_variable cv;

    void enter() {
        if (limit <= 0) return;
        std::unique_lock lock(m);
        cv.wait(lock, [&] { return active < limit; });
        ++active;
    }
    void leave() {
        if (limit <= 0) return;
        {
            std::lock_guard lock(m);
            --active;
        }
        cv.notify_one();
    }
};

struct ParsedUrl {
    std::string scheme_host_port;  // e.g. "http://127.0.0.1:8080"
};

}  // namespace

void apply_agent_env(AgentConfig& cfg) {
    if (const char* base = env_or("OFFSETSIM_API_BASE", "OPENAI_BASE_URL")) cfg.base_url = base;
    if (const char* key = env_or("OFFSETSIM_API_KEY", "OPENAI_API_KEY")) cfg.api_key = key;
}

struct RemoteAgent::Impl {
    AgentConfig cfg;
    std::unique_ptr<ResponseCache> cache;
    TokenBucket bucket;
    ConcurrencyGate gate;
    std::atomic<std::uint64_t> requests{0};
    std::atomic<std::uint64_t> hits{0};

    std::mutex inflight_m;
    std::condition_variable inflight_cv;
    std::unordered_set<std::string> inflight;
    std::mutex audit_m;

    explicit Impl(AgentConfig c) : cfg(std::move(c)) {
        if (cfg.cache_enabled) cache = std::make_unique<ResponseCache>(cfg.cache_path);
        bucket.rps = cfg.rate_limit_rps;
        gate.limit = cfg.max_concurrent_requests;
    }

    void audit(const std::string& system_prompt, const std::string& user_prompt,
               std::uint64_t sample_index, const std::string& raw) {
        if (cfg.audit_log.empty()) return;
        std::lock_guard lock(audit_m);
        std::ofstream out(cfg.audit_log, std::ios::binary | std::ios::app);
        if (!out) return;  // audit is best-effort
        out << json{{"model", cfg.model_name}, {"system", system_prompt},
                    {"user", user_prompt}, {"sample_index", sample_index}, {"raw", raw}}
                   .dump()
            << '\n';
    }

    httplib::Client& client() {
        // one connection per thread; httplib clients are not shareable
        thread_local std::unordered_map<std::string, std::unique_ptr<httplib::Client>> pool;
        auto& slot = pool[cfg.base_url];
        if (!slot) {
            slot = std::make_unique<httplib::Client>(cfg.base_url);
            slot->set_connection_timeout(cfg.request_timeout_s);
            slot->set_read_timeout(cfg.request_timeout_s);
            slot->set_keep_alive(true);
            slot->set_tcp_nodelay(true);
        }
        return *slot;
    }

    // One POST with transient-failure retries. Returns the reply content.
    std::string request_completion(const std::string& system_prompt,
                                   const std::string& user_prompt) {
        const json payload{
            {"model", cfg.model_name},
            {"temperature", cfg.temperature},
            {"messages",
             json::array({json{{"role", "system"}, {"content", system_prompt}},
                          json{{"role", "user"}, {"content", user_prompt}}})}};
        const std::string body = payload.dump();

        httplib::Headers headers;
        if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);

        std::string last_error = "no attempt made";
        for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
            if (attempt > 0) {
                const int delay = cfg.retry_initial_delay_ms << std::min(attempt - 1, 10);
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(std::min(delay, 30'000)));
            }
            bucket.acquire();
            gate.enter();
            requests.fetch_add(1, std::memory_order_relaxed);
            httplib::Result res =
                client().Post(cfg.api_path, headers, body, "application/json");
            gate.leave();

            if (!res) {
                last_error = "transport: " + httplib::to_string(res.error());
                continue;
            }
            if (is_transient_status(res->status)) {
                last_error = "status " + std::to_string(res->status);
                continue;
            }
            if (res->status < 200 || res->status >= 300)
                throw TransportError("remote backend returned status " +
                                     std::to_string(res->status) + ": " + res->body);
            json reply = json::parse(res->body, nullptr, false);
            if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty()) {
                last_error = "malformed completion body";
                continue;
            }
            return reply["choices"][0]["message"]["content"].get<std::string>();
        }
        throw TransportError("remote backend failed after " +
                             std::to_string(cfg.max_retries + 1) + " attempts: " + last_error);
    }
};

RemoteAgent::RemoteAgent(AgentConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {}

RemoteAgent::~RemoteAgent() = default;

std::uint64_t RemoteAgent::requests_sent() const {
    return impl_->requests.load(std::memory_order_relaxed);
}

std::uint64_t RemoteAgent::cache_hits() const {
    return impl_->hits.load(std::memory_order_relaxed);
}

AgentResponse RemoteAgent::choose(const std::string& system_prompt,
                                  const std::string& user_prompt, int k_options,
                                  const std::vector<OptionRole>& order,
                                  std::uint64_t sample_index) {
    const auto started = std::chrono::steady_clock::now();
    const std::string key = ResponseCache::make_key(impl_->cfg.model_name, system_prompt,
                                                    user_prompt, order, sample_index);

    auto finish = [&](const std::string& raw, int attempts, bool cached) {
        AgentResponse resp;
        resp.raw_text = raw;
        resp.attempt_count = attempts;
        resp.from_cache = cached;
        resp.choice = map_reply_to_choice(parse_choice(raw, k_options), order);
        resp.latency_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - started)
                              .count();
        return resp;
    };

    if (impl_->cache) {
        // atomic get-or-insert: only one caller per key talks to the backend
        std::unique_lock lock(impl_->inflight_m);
        for (;;) {
            if (auto cached = impl_->cache->lookup(key)) {
                impl_->hits.fetch_add(1, std::memory_order_relaxed);
                return finish(*cached, 0, true);
            }
            if (!impl_->inflight.contains(key)) {
                impl_->inflight.insert(key);
                break;
            }
            impl_->inflight_cv.wait(lock);
        }
    }

    std::string raw;
    int attempts = 0;
    try {
        // re-sample on unparseable replies, up to the retry budget
        for (attempts = 1; attempts <= impl_->cfg.max_retries + 1; ++attempts) {
            raw = impl_->request_completion(system_prompt, user_prompt);
            if (parse_choice(raw, k_options) != 0) break;
        }
    } catch (...) {
        if (impl_->cache) {
            std::lock_guard lock(impl_->inflight_m);
            impl_->inflight.erase(key);
            impl_->inflight_cv.notify_all();
        }
        throw;
    }

    impl_->audit(system_prompt, user_prompt, sample_index, raw);
    if (impl_->cache) {
        impl_->cache->insert(key, impl_->cfg.model_name, sample_index, raw);
        std::lock_guard lock(impl_->inflight_m);
        impl_->inflight.erase(key);
        impl_->inflight_cv.notify_all();
    }
    return finish(raw, std::min(attempts, impl_->cfg.max_retries + 1), false);
}

}  // namespace offsetsim
