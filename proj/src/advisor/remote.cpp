#include "varl/advisor/remote.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <regex>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "varl/advisor/prompt.hpp"
#include "varl/errors.hpp"

namespace varl::advisor {

void RemoteConfig::validate() const {
    parse_endpoint(endpoint);
    if (!(timeout_seconds > 0.0)) throw ConfigError("advisor.timeout_seconds must be positive");
    if (retries < 0) throw ConfigError("advisor.retries must be >= 0");
    if (parallelism == 0) throw ConfigError("advisor.parallelism must be >= 1");
}

Endpoint parse_endpoint(const std::string& url) {
    static const std::regex pattern(R"(^(http)://([A-Za-z0-9.\-]+|\[[0-9A-Fa-f:]+\])(:[0-9]{1,5})?(/[^\s]*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, pattern)) {
        throw ConfigError("advisor endpoint must look like http://host:port/path, got '" + url + "'");
    }
    Endpoint e;
    e.scheme_host_port = m[1].str() + "://" + m[2].str() + m[3].str();
    e.path = m[4].matched && m[4].str() != "/" ? m[4].str() : "/complete";
    return e;
}

CompletionClient::CompletionClient(RemoteConfig config) : config_(std::move(config)) {
    config_.validate();
    endpoint_ = parse_endpoint(config_.endpoint);
}

std::optional<std::string> CompletionClient::complete(const std::string& prompt, std::uint64_t& requests) const {
    httplib::Client client(endpoint_.scheme_host_port);
    const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    httplib::Headers headers;
    if (!config_.api_key_header.empty() && !config_.api_key_env.empty()) {
        if (const char* key = std::getenv(config_.api_key_env.c_str()); key != nullptr && *key != '\0') {
            headers.emplace(config_.api_key_header, key);
        }
    }
    const std::string body = nlohmann::json{{"prompt", prompt}}.dump();
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(10 * attempt));
        ++requests;
        const auto res = client.Post(endpoint_.path, headers, body, "application/json");
        if (!res || res->status < 200 || res->status >= 300) continue;
        const auto reply = nlohmann::json::parse(res->body, nullptr, false);
        if (reply.is_discarded() || !reply.is_object()) continue;
        const auto it = reply.find("completion");
        if (it == reply.end() || !it->is_string()) continue;
        return it->get<std::string>();
    }
    return std::nullopt;
}

RemoteAdvisor::RemoteAdvisor(std::unique_ptr<envs::Environment> env, RemoteConfig config)
    : env_(std::move(env)), client_(std::move(config)) {
    if (!env_) throw ConfigError("remote advisor needs an environment");
}

Advice RemoteAdvisor::resolve(const std::string& prompt, std::uint64_t& requests, std::uint64_t& repairs) const {
    const auto& space = env_->spec().action_space;
    const auto first = client_.complete(prompt, requests);
    if (!first) return {AdviceStatus::TransportFailure, std::nullopt};
    auto parsed = parse_action(*first, space);
    if (parsed.status == ParseStatus::Ok) return {AdviceStatus::Ok, parsed.action};
    if (!client_.config().repair) return {AdviceStatus::ParseFailure, std::nullopt};
    ++repairs;
    const auto second = client_.complete(render_repair_prompt(prompt, *first), requests);
    if (!second) return {AdviceStatus::ParseFailure, std::nullopt};
    parsed = parse_action(*second, space);
    if (parsed.status == ParseStatus::Ok) return {AdviceStatus::Ok, parsed.action};
    return {AdviceStatus::ParseFailure, std::nullopt};
}

std::vector<Advice> RemoteAdvisor::advise(const std::vector<buffers::Transition>& batch) {
    std::vector<std::string> prompts;
    prompts.reserve(batch.size());
    for (const auto& t : batch) prompts.push_back(render_prompt(make_request(*env_, t.state, t.action)));

    // Distinct prompts not answered yet, in first-seen order.
    std::vector<std::string> pending;
    std::map<std::string, std::size_t> slot;
    for (const auto& p : prompts) {
        if (cache_.count(p) || slot.count(p)) continue;
        slot.emplace(p, pending.size());
        pending.push_back(p);
    }

    std::vector<Advice> fresh(pending.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::uint64_t> requests{0};
    std::atomic<std::uint64_t> repairs{0};
    auto worker = [&] {
        std::uint64_t local_requests = 0;
        std::uint64_t local_repairs = 0;
        for (std::size_t i = next++; i < pending.size(); i = next++) {
            fresh[i] = resolve(pending[i], local_requests, local_repairs);
        }
        requests += local_requests;
        repairs += local_repairs;
    };
    const std::size_t workers = std::min(client_.config().parallelism, pending.size());
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    counters_.network_requests += requests.load();
    counters_.repairs += repairs.load();

    std::vector<Advice> out;
    out.reserve(batch.size());
    std::vector<bool> first_use(pending.size(), true);
    for (const auto& p : prompts) {
        ++counters_.queries;
        Advice advice;
        if (const auto it = slot.find(p); it != slot.end() && first_use[it->second]) {
            first_use[it->second] = false;
            advice = fresh[it->second];
        } else if (it != slot.end()) {
            ++counters_.cache_hits;
            advice = fresh[it->second];
        } else {
            ++counters_.cache_hits;
            advice = cache_.at(p);
        }
        if (advice.status == AdviceStatus::ParseFailure) ++counters_.parse_failures;
        if (advice.status == AdviceStatus::TransportFailure) ++counters_.transport_failures;
        out.push_back(advice);
    }
    // Transport failures are not remembered, so a later trigger may retry them.
    for (std::size_t i = 0; i < pending.size(); ++i) {
        if (fresh[i].status != AdviceStatus::TransportFailure) cache_.emplace(pending[i], fresh[i]);
    }
    return out;
}

std::unique_ptr<Advisor> RemoteAdvisor::clone() const {
    auto copy = std::make_unique<RemoteAdvisor>(env_->clone(), client_.config());
    copy->cache_ = cache_;
    copy->counters_ = counters_;
    return copy;
}

Advice RemoteAdvisor::advise_one(std::span<const double> state, const envs::Action& prior) {
    buffers::Transition t;
    t.state.assign(state.begin(), state.end());
    t.action = prior;
    return advise({t}).front();
}

}  // namespace varl::advisor
