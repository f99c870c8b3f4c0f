#include "varl/advisor/mock_server.hpp"

#include <algorithm>

#include "httplib.h"
#include "json.hpp"
#include "varl/advisor/prompt.hpp"
#include "varl/errors.hpp"

namespace varl::advisor {

MockMode parse_mock_mode(const std::string& name) {
    if (name == "fixed") return MockMode::Fixed;
    if (name == "echo") return MockMode::EchoPrior;
    if (name == "oracle") return MockMode::Oracle;
    throw ConfigError("unknown mock mode '" + name + "' (expected fixed, echo or oracle)");
}

MockAdvisorServer::MockAdvisorServer(MockConfig config)
    : config_(std::move(config)), server_(std::make_unique<httplib::Server>()) {
    if (config_.mode == MockMode::Oracle && !config_.env) throw ConfigError("oracle mock needs an environment");
    install_routes();
}

MockAdvisorServer::~MockAdvisorServer() { stop(); }

std::string MockAdvisorServer::answer(const std::string& prompt) const {
    switch (config_.mode) {
        case MockMode::Fixed:
            return config_.reply;
        case MockMode::EchoPrior: {
            const auto prior = find_field(prompt, "prior_action");
            return prior ? "action: " + *prior : "no prior action found";
        }
        case MockMode::Oracle: {
            auto state = parse_state_line(prompt);
            if (!state) return "no state found";
            // Renderings may omit trailing encodings; oracles only read the leading fields.
            state->resize(std::max(state->size(), config_.env->spec().state_dim), 0.0);
            const auto action = config_.env->oracle_action(*state);
            return "action: " + render_answer_value(config_.env->spec().action_space, action);
        }
    }
    return config_.reply;
}

void MockAdvisorServer::install_routes() {
    server_->Post("/complete", [this](const httplib::Request& req, httplib::Response& res) {
        const std::uint64_t n = ++hits_;
        if (n <= config_.fail_first) {
            ++failures_;
            res.status = 503;
            res.set_content(R"({"error":"injected failure"})", "application/json");
            return;
        }
        const auto body = nlohmann::json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object() || !body.contains("prompt") || !body["prompt"].is_string()) {
            res.status = 400;
            res.set_content(R"({"error":"expected {\"prompt\": string}"})", "application/json");
            return;
        }
        ++completions_;
        res.set_content(nlohmann::json{{"completion", answer(body["prompt"].get<std::string>())}}.dump(),
                        "application/json");
    });
    server_->Get("/stats", [this](const httplib::Request&, httplib::Response& res) {
        res.set_content(
            nlohmann::json{{"hits", hits_.load()}, {"completions", completions_.load()}, {"failures", failures_.load()}}
                .dump(),
            "application/json");
    });
}

int MockAdvisorServer::start(const std::string& host, int port) {
    if (thread_.joinable()) throw Error("mock advisor already running");
    host_ = host;
    if (port == 0) {
        port_ = server_->bind_to_any_port(host);
    } else {
        port_ = server_->bind_to_port(host, port) ? port : -1;
    }
    if (port_ <= 0) throw Error("mock advisor could not bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port_;
}

void MockAdvisorServer::serve_forever(const std::string& host, int port) {
    host_ = host;
    port_ = port;
    if (!server_->listen(host, port)) throw Error("mock advisor could not listen on " + host + ":" + std::to_string(port));
}

void MockAdvisorServer::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

std::string MockAdvisorServer::url() const { return "http://" + host_ + ":" + std::to_string(port_) + "/complete"; }

}  // namespace varl::advisor
