#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "varl/envs/environment.hpp"

namespace httplib {
class Server;
}

namespace varl::advisor {

enum class MockMode {
    Fixed,      // always reply with `reply`
    EchoPrior,  // answer with the prior action from the prompt
    Oracle,     // answer with the environment oracle for the prompt's state
};

struct MockConfig {
    MockMode mode = MockMode::Fixed;
    std::string reply = "action: 0";
    // Oracle mode: environment used to compute answers.
    std::shared_ptr<const envs::Environment> env;
    // The first `fail_first` completion requests get HTTP 503.
    std::uint64_t fail_first = 0;
};

MockMode parse_mock_mode(const std::string& name);

/// In-process HTTP server speaking the advisor wire format:
///   POST /complete  {"prompt": "..."}  ->  {"completion": "..."}
///   GET  /stats     -> {"hits": n, "completions": n, "failures": n}
/// `hits` counts every POST /complete, including injected failures.
class MockAdvisorServer {
public:
    explicit MockAdvisorServer(MockConfig config);
    ~MockAdvisorServer();

    MockAdvisorServer(const MockAdvisorServer&) = delete;
    MockAdvisorServer& operator=(const MockAdvisorServer&) = delete;

    /// Binds (port 0 = any free port) and serves on a background thread.
    /// Returns the bound port.
    int start(const std::string& host = "127.0.0.1", int port = 0);

    /// Serves on the calling thread until stop() is called from elsewhere.
    void serve_forever(const std::string& host, int port);

    void stop();

    std::string url() const;
    std::uint64_t hits() const { return hits_.load(); }
    std::uint64_t completions() const { return completions_.load(); }

    /// The reply the server would give for `prompt`, ignoring failure injection.
    std::string answer(const std::string& prompt) const;

private:
    void install_routes();

    MockConfig config_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    std::string host_;
    int port_ = 0;
    std::atomic<std::uint64_t> hits_{0};
    std::atomic<std::uint64_t> completions_{0};
    std::atomic<std::uint64_t> failures_{0};
};

}  // namespace varl::advisor
