#include <csignal>
#include <filesystem>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "varl/advisor/mock_server.hpp"
#include "varl/envs/registry.hpp"
#include "varl/errors.hpp"
#include "varl/harness/config.hpp"
#include "varl/harness/experiment.hpp"
#include "varl/harness/summary.hpp"

namespace {

using namespace varl;
using nlohmann::json;

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct RunArgs {
    std::string config;
    std::vector<std::uint64_t> seeds;
    std::string algo;
    std::string env;
    std::string out;
    std::string endpoint;
    std::optional<std::uint64_t> max_steps;
    std::optional<double> lambda;
    std::optional<std::uint64_t> cutoff;
    std::optional<double> kappa;
    std::optional<std::size_t> recent;
    bool quiet = false;
};

int cmd_run(const RunArgs& a) {
    json j = json::object();
    std::optional<std::string> input_text;
    if (!a.config.empty()) {
        std::ifstream in(a.config);
        if (!in) throw ConfigError("cannot open config file " + a.config);
        std::stringstream buf;
        buf << in.rdbuf();
        input_text = buf.str();
        try {
            j = json::parse(*input_text, nullptr, true, /*ignore_comments=*/true);
        } catch (const json::parse_error& e) {
            throw ConfigError("config file " + a.config + " is not valid JSON: " + e.what());
        }
    }
    auto cfg = harness::config_from_json(j);
    if (!a.seeds.empty()) cfg.seeds = a.seeds;
    if (!a.algo.empty()) cfg.algorithm = harness::parse_algorithm(a.algo);
    if (!a.env.empty()) cfg.env = a.env;
    if (!a.out.empty()) cfg.output_dir = a.out;
    if (!a.endpoint.empty()) {
        cfg.advisor.kind = harness::AdvisorKind::Remote;
        cfg.advisor.remote.endpoint = a.endpoint;
    }
    if (a.max_steps) cfg.max_steps = *a.max_steps;
    if (a.lambda) cfg.shaping.lambda = *a.lambda;
    if (a.cutoff) cfg.shaping.cutoff = *a.cutoff;
    if (a.kappa) cfg.shaping.kappa = *a.kappa;
    if (a.recent) cfg.advisor.recent = *a.recent;
    cfg.validate();

    const auto outcomes = harness::run_sweep(cfg, cfg.output_dir, input_text, a.quiet ? nullptr : &std::cerr);
    for (const auto& o : outcomes) {
        const auto dir = o.label.empty() ? std::filesystem::path(cfg.output_dir) : cfg.output_dir / std::filesystem::path(o.label);
        const auto summary = harness::summarize_run(dir);
        std::cout << dir.string() << ": " << summary.algorithm << " on " << summary.env << ", " << summary.reached
                  << "/" << summary.seeds.size() << " seeds reached the threshold, median steps "
                  << summary.median_steps << '\n';
    }
    return 0;
}

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

int cmd_summarize(const std::vector<std::string>& dirs, const std::string& json_out) {
    json all = json::array();
    std::cout << std::left << std::setw(28) << "run" << std::setw(20) << "algorithm" << std::setw(18) << "env"
              << std::setw(9) << "reached" << std::setw(14) << "median_steps" << std::setw(15) << "final_success"
              << "final_return\n";
    for (const auto& dir : dirs) {
        const auto s = harness::summarize_run(dir);
        for (const auto& w : s.warnings) std::cerr << "warning: " << dir << ": " << w << '\n';
        std::ostringstream reached;
        reached << s.reached << "/" << s.seeds.size();
        std::cout << std::left << std::setw(28) << dir << std::setw(20) << s.algorithm << std::setw(18) << s.env
                  << std::setw(9) << reached.str() << std::setw(14) << s.median_steps << std::setw(15)
                  << std::setprecision(3) << mean_of(s.final_success) << mean_of(s.final_return) << '\n';
        auto j = harness::summary_to_json(s);
        j["run"] = dir;
        all.push_back(std::move(j));
    }
    if (!json_out.empty()) {
        std::ofstream out(json_out);
        if (!out) throw Error("cannot write " + json_out);
        out << all.dump(2) << '\n';
    }
    return 0;
}

int cmd_ledger(const std::string& dir) {
    const auto ledgers = harness::read_ledgers(dir);
    if (ledgers.empty()) throw ValidationError("no ledgers in " + dir);
    for (const auto& [seed, ledger] : ledgers) {
        std::cout << "seed " << seed << ": " << harness::format_ledger_report(harness::ledger_report(ledger))
                  << " added " << ledger.total_added() << '\n';
    }
    return 0;
}

advisor::MockAdvisorServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

int cmd_mock(const std::string& host, int port, const std::string& mode, const std::string& reply,
             const std::string& env, std::uint64_t fail_first) {
    advisor::MockConfig cfg;
    cfg.mode = advisor::parse_mock_mode(mode);
    cfg.reply = reply;
    cfg.fail_first = fail_first;
    if (cfg.mode == advisor::MockMode::Oracle) cfg.env = envs::make_env(env);
    advisor::MockAdvisorServer server(cfg);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "mock advisor listening on http://" << host << ":" << port << "/complete (" << mode << ")\n";
    server.serve_forever(host, port);
    g_server = nullptr;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Soft actor-critic with advisor-gated behaviour cloning"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Train every configured seed and write a run directory");
    run_cmd->add_option("--config", run.config, "JSON configuration file");
    run_cmd->add_option("--seed,--seeds", run.seeds, "Seeds to run (overrides the config)")->delimiter(',');
    run_cmd->add_option("--algo", run.algo, "varl, sac or sac_expert_prefill");
    run_cmd->add_option("--env", run.env, "Environment name");
    run_cmd->add_option("--out", run.out, "Output directory");
    run_cmd->add_option("--endpoint", run.endpoint, "Use a remote advisor at this URL");
    run_cmd->add_option("--max-steps", run.max_steps, "Training budget in environment steps");
    run_cmd->add_option("--lambda", run.lambda, "Shaping weight");
    run_cmd->add_option("--cutoff", run.cutoff, "Last step with shaping");
    run_cmd->add_option("--kappa", run.kappa, "Continuous gate radius");
    run_cmd->add_option("--recent,-K", run.recent, "Transitions per advisor trigger");
    run_cmd->add_flag("--quiet", run.quiet, "No progress output");

    std::vector<std::string> dirs;
    std::string summary_json;
    auto* sum_cmd = app.add_subcommand("summarize", "Compare run directories");
    sum_cmd->add_option("runs", dirs, "Run directories")->required();
    sum_cmd->add_option("--json", summary_json, "Also write the summaries to this file");

    std::string ledger_dir;
    auto* ledger_cmd = app.add_subcommand("ledger", "Report advisor trigger batches of a run");
    ledger_cmd->add_option("run", ledger_dir, "Run directory")->required();

    std::string host = "127.0.0.1";
    int port = 8765;
    std::string mode = "fixed";
    std::string reply = "action: 0";
    std::string mock_env = "SparseGridWorld";
    std::uint64_t fail_first = 0;
    auto* mock_cmd = app.add_subcommand("mock-advisor", "Serve the advisor wire format locally");
    mock_cmd->add_option("--host", host);
    mock_cmd->add_option("--port", port);
    mock_cmd->add_option("--mode", mode, "fixed, echo or oracle");
    mock_cmd->add_option("--reply", reply, "Completion text in fixed mode");
    mock_cmd->add_option("--env", mock_env, "Environment used by oracle mode");
    mock_cmd->add_option("--fail-first", fail_first, "Answer the first N requests with HTTP 503");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(run);
        if (sum_cmd->parsed()) return cmd_summarize(dirs, summary_json);
        if (ledger_cmd->parsed()) return cmd_ledger(ledger_dir);
        if (mock_cmd->parsed()) return cmd_mock(host, port, mode, reply, mock_env, fail_first);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}
