// In-process chat-completions stub for transport tests: counts requests,
// injects transient failures, and answers with a scripted option number.
#pragma once

#include <atomic>
#include <functional>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace stub {

class ChatStub {
public:
    // reply_fn(request_payload, request_number) -> message content
    using ReplyFn = std::function<std::string(const nlohmann::json&, int)>;

    explicit ChatStub(ReplyFn reply_fn) : reply_(std::move(reply_fn)) {
        server_.Post("/v1/chat/completions",
                     [this](const httplib::Request& req, httplib::Response& res) {
                         const int n = ++requests_;
                         if (fail_first_ > 0 && n <= fail_first_) {
                             res.status = 500;
                             res.set_content("injected transient failure", "text/plain");
                             return;
                         }
                         if (always_fail_) {
                             res.status = 503;
                             res.set_content("injected outage", "text/plain");
                             return;
                         }
                         const nlohmann::json payload = nlohmann::json::parse(req.body);
                         const nlohmann::json reply{
                             {"choices",
                              nlohmann::json::array(
                                  {{{"message", {{"role", "assistant"},
                                                 {"content", reply_(payload, n)}}}}})}};
                         res.set_content(reply.dump(), "application/json");
                     });
        server_.set_tcp_nodelay(true);
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~ChatStub() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }
    int requests() const { return requests_.load(); }
    void fail_first(int n) { fail_first_ = n; }
    void set_always_fail(bool v) { always_fail_ = v; }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> requests_{0};
    std::atomic<int> fail_first_{0};
    std::atomic<bool> always_fail_{false};
    ReplyFn reply_;
};

}  // namespace stub
