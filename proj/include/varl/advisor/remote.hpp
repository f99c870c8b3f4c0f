#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "varl/advisor/advisor.hpp"
#include "varl/envs/environment.hpp"

namespace varl::advisor {

struct RemoteConfig {
    std::string endpoint = "http://127.0.0.1:8765/complete";
    // Sent as `<api_key_header>: $<api_key_env>` when both are set and the
    // variable is non-empty.
    std::string api_key_header;
    std::string api_key_env = "VARL_ADVISOR_API_KEY";
    double timeout_seconds = 30.0;
    int retries = 2;
    std::size_t parallelism = 4;
    bool repair = true;

    void validate() const;
    bool operator==(const RemoteConfig&) const = default;
};

struct Endpoint {
    std::string scheme_host_port;  // "http://host:port"
    std::string path;              // "/complete"
};

/// Splits "http://host:port/path"; throws ConfigError on anything else.
Endpoint parse_endpoint(const std::string& url);

/// One prompt/completion exchange over the JSON wire format, with retries.
class CompletionClient {
public:
    explicit CompletionClient(RemoteConfig config);

    /// nullopt when every attempt failed at the transport level (connection
    /// errors, non-2xx status, or a reply without a "completion" string).
    /// `requests` is incremented once per attempt.
    std::optional<std::string> complete(const std::string& prompt, std::uint64_t& requests) const;

    const RemoteConfig& config() const { return config_; }

private:
    RemoteConfig config_;
    Endpoint endpoint_;
};

/// Advisor backed by a remote completion endpoint. Identical rendered
/// prompts are answered from a per-run cache; distinct prompts in a batch are
/// sent with bounded parallelism, and results are assembled in batch order.
class RemoteAdvisor final : public Advisor {
public:
    RemoteAdvisor(std::unique_ptr<envs::Environment> env, RemoteConfig config);

    std::vector<Advice> advise(const std::vector<buffers::Transition>& batch) override;
    const AdvisorCounters& counters() const override { return counters_; }
    std::unique_ptr<Advisor> clone() const override;

    /// Single query, for tests and the CLI.
    Advice advise_one(std::span<const double> state, const envs::Action& prior);

    std::size_t cache_size() const { return cache_.size(); }

private:
    Advice resolve(const std::string& prompt, std::uint64_t& requests, std::uint64_t& repairs) const;

    std::unique_ptr<envs::Environment> env_;
    CompletionClient client_;
    std::map<std::string, Advice> cache_;
    AdvisorCounters counters_;
};

}  // namespace varl::advisor
