// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "support/tabular.hpp"
#include "varl/advisor/mock_server.hpp"
#include "varl/advisor/remote.hpp"
#include "varl/envs/grid_world.hpp"
#include "varl/envs/registry.hpp"
#include "varl/envs/tiny_mdp.hpp"
#include "varl/errors.hpp"
#include "varl/harness/experiment.hpp"
#include "varl/harness/summary.hpp"
#include "varl/numerics/checkpoint.hpp"
#include "varl/shaping/shaping.hpp"

namespace fs = std::filesystem;
using namespace varl;
using harness::Algorithm;
using harness::ExperimentConfig;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Context {
    fs::path configs;
    fs::path runs;
    bool verbose = false;
};

std::string fmt(double v, int precision = 3) {
    std::ostringstream out;
    out.precision(precision);
    out << v;
    return out.str();
}

ExperimentConfig load(const Context& ctx, const std::string& name) {
    return harness::load_config(ctx.configs / name);
}

std::vector<harness::SeedOutcome> run(const Context& ctx, ExperimentConfig cfg, const std::string& name) {
    const auto dir = ctx.runs / name;
    fs::remove_all(dir);
    cfg.output_dir = dir.string();
    return harness::run_experiment(cfg, dir, std::nullopt, ctx.verbose ? &std::clog : nullptr);
}

std::string steps_list(const harness::RunSummary& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.steps_to_threshold.size(); ++i) {
        if (i) out += " ";
        out += s.steps_to_threshold[i] ? std::to_string(*s.steps_to_threshold[i]) : "-";
    }
    return out + "]";
}

// --- 1: gradients against central finite differences -----------------------

double relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric) {
    double diff = 0.0, a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
        a += analytic[i] * analytic[i];
        b += numeric[i] * numeric[i];
    }
    const double scale = std::max(std::sqrt(std::max(a, b)), 1e-12);
    return std::sqrt(diff) / scale;
}

std::vector<double> central_differences(std::span<double> params, const std::function<double()>& loss) {
    const double h = 1e-6;
    std::vector<double> out(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double orig = params[i];
        params[i] = orig + h;
        const double up = loss();
        params[i] = orig - h;
        const double down = loss();
        params[i] = orig;
        out[i] = (up - down) / (2.0 * h);
    }
    return out;
}

std::vector<buffers::Transition> random_batch(const sac::SacAgent& agent, std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<buffers::Transition> batch;
    for (std::size_t i = 0; i < n; ++i) {
        buffers::Transition t;
        t.state.resize(agent.state_dim());
        t.next_state.resize(agent.state_dim());
        for (double& v : t.state) v = normal(rng);
        for (double& v : t.next_state) v = normal(rng);
        t.action = envs::sample_uniform(agent.action_space(), rng);
        t.reward = unit(rng);
        t.terminal = i % 4 == 0;
        batch.push_back(std::move(t));
    }
    return batch;
}

Outcome gradient_correctness(const Context&) {
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<std::size_t> small(1, 4), width(3, 12);
    double worst_discrete = 0.0, worst_box = 0.0;
    std::size_t configs = 0;
    for (int c = 0; c < 12; ++c) {
        const bool discrete = c % 2 == 0;
        sac::SacConfig cfg;
        cfg.hidden.assign(small(rng) % 2 + 1, 0);
        for (auto& h : cfg.hidden) h = width(rng);
        cfg.activation = c % 4 < 2 ? numerics::Activation::Tanh : numerics::Activation::Relu;
        cfg.alpha = 0.05 + 0.1 * static_cast<double>(c % 3);
        cfg.gamma = 0.9;
        const std::size_t state_dim = small(rng) + 1;
        envs::ActionSpace space = envs::DiscreteSpace{small(rng) + 1, {}};
        if (!discrete) {
            const std::size_t d = small(rng) % 3 + 1;
            envs::BoxSpace box;
            for (std::size_t i = 0; i < d; ++i) {
                box.low.push_back(-1.0 - 0.5 * static_cast<double>(i));
                box.high.push_back(1.0 + 0.25 * static_cast<double>(i));
            }
            space = box;
        }
        sac::SacAgent agent(state_dim, space, cfg, 100 + static_cast<std::uint64_t>(c));

        // Actor: baseline loss plus an active behaviour-cloning term.
        const auto batch = random_batch(agent, 6, rng);
        numerics::Matrix states(batch.size(), state_dim);
        for (std::size_t i = 0; i < batch.size(); ++i) std::copy(batch[i].state.begin(), batch[i].state.end(), states.row(i).begin());
        const numerics::Matrix noise = agent.sample_noise(batch.size(), rng);
        const numerics::Matrix* noise_ptr = discrete ? nullptr : &noise;
        buffers::GuidanceBuffer guidance(space);
        for (const auto& t : batch) guidance.push(t.state, envs::sample_uniform(space, rng));
        shaping::ShapingConfig shape;
        shape.lambda = 2.0;
        shape.kappa = 0.1;
        const auto& pairs = guidance.pairs();
        const auto actor = shaping::actor_loss(agent, shape, 1, states, noise_ptr, pairs);
        const auto actor_fd = central_differences(agent.actor().parameters(), [&] {
            return shaping::actor_loss(agent, shape, 1, states, noise_ptr, pairs).total.loss;
        });
        double err = relative_error(actor.total.grad, actor_fd);

        // Critics: TD loss against frozen targets (box targets use frozen noise).
        std::mt19937_64 target_rng(7 + static_cast<std::uint64_t>(c));
        const auto targets = agent.critic_targets(batch, target_rng);
        for (int which = 0; which < 2; ++which) {
            const auto g = agent.critic_loss(which, batch, targets);
            const auto fd = central_differences(agent.critic(which).parameters(),
                                                [&] { return agent.critic_loss(which, batch, targets).loss; });
            err = std::max(err, relative_error(g.grad, fd));
        }
        (discrete ? worst_discrete : worst_box) = std::max(discrete ? worst_discrete : worst_box, err);
        ++configs;
    }
    const bool pass = configs >= 10 && worst_discrete <= 1e-4 && worst_box <= 1e-3;
    return {pass, std::to_string(configs) + " configurations, worst relative error discrete " + fmt(worst_discrete) +
                      " (<= 1e-4), box " + fmt(worst_box) + " (<= 1e-3)"};
}

// --- 2: gates against independent oracles -----------------------------------

Outcome gate_equivalence(const Context&) {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::size_t discrete_mismatch = 0, box_mismatch = 0, ties = 0, active_d = 0, active_b = 0;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = 2 + static_cast<std::size_t>(i % 4);
        sac::SacConfig cfg;
        cfg.hidden = {6};
        sac::SacAgent agent(3, envs::DiscreteSpace{n, {}}, cfg, static_cast<std::uint64_t>(1000 + i));
        if (i % 10 == 0) {
            // Constant critics with a deliberate tie between actions 0 and 1.
            for (int w = 0; w < 2; ++w) {
                auto& net = agent.critic(w);
                for (double& p : net.parameters()) p = 0.0;
                auto b = net.bias(net.layer_count() - 1);
                for (std::size_t a = 0; a < n; ++a) b[a] = a < 2 ? 1.0 : normal(rng) - 2.0;
            }
        }
        std::vector<double> s{normal(rng), normal(rng), normal(rng)};
        const std::size_t advice = static_cast<std::size_t>(rng() % n);
        const auto q1 = agent.critic(0).forward(s);
        const auto q2 = agent.critic(1).forward(s);
        double best = -INFINITY;
        for (std::size_t a = 0; a < n; ++a) best = std::max(best, std::min(q1[a], q2[a]));
        std::set<std::size_t> maximisers;
        for (std::size_t a = 0; a < n; ++a) {
            if (std::min(q1[a], q2[a]) == best) maximisers.insert(a);
        }
        ties += maximisers.size() > 1;
        const bool expected = !maximisers.count(advice);
        const bool got = shaping::gate_discrete(agent, s, advice).active;
        discrete_mismatch += expected != got;
        active_d += got;
    }
    for (int i = 0; i < 1000; ++i) {
        const std::size_t d = 1 + static_cast<std::size_t>(i % 3);
        envs::BoxSpace box;
        for (std::size_t k = 0; k < d; ++k) {
            box.low.push_back(-2.0);
            box.high.push_back(1.0 + static_cast<double>(k));
        }
        sac::SacConfig cfg;
        cfg.hidden = {6};
        sac::SacAgent agent(2, box, cfg, static_cast<std::uint64_t>(5000 + i));
        const double kappa = 0.25 + 0.5 * static_cast<double>(i % 5);
        std::vector<double> s{2.0 * normal(rng), 2.0 * normal(rng)};
        const auto advice = std::get<std::vector<double>>(envs::sample_uniform(box, rng));
        // Independent recomputation of the quadratic form in pre-squash space.
        const auto row = agent.actor().forward(s);
        double d2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double mean = row[k];
            const double log_std = std::clamp(row[d + k], cfg.log_std_min, cfg.log_std_max);
            double unit = 2.0 * (advice[k] - box.low[k]) / (box.high[k] - box.low[k]) - 1.0;
            unit = std::clamp(unit, -buffers::kSquashClamp, buffers::kSquashClamp);
            const double z = (std::atanh(unit) - mean) / std::exp(log_std);
            d2 += z * z;
        }
        const bool expected = d2 > kappa * kappa;
        const bool got = shaping::gate_continuous(agent, s, advice, kappa).active;
        box_mismatch += expected != got;
        active_b += got;
    }
    return {discrete_mismatch == 0 && box_mismatch == 0,
            "discrete mismatches " + std::to_string(discrete_mismatch) + "/1000 (" + std::to_string(active_d) +
                " active, " + std::to_string(ties) + " tied), continuous mismatches " + std::to_string(box_mismatch) +
                "/1000 (" + std::to_string(active_b) + " active)"};
}

// --- 3: runs past the cutoff are plain SAC ----------------------------------

Outcome cutoff_exactness(const Context& ctx) {
    auto cfg = load(ctx, "default.json");
    cfg.env_options["size"] = 5;
    cfg.max_steps = 4000;
    cfg.shaping.cutoff = 2000;
    cfg.advisor.recent = 200;

    // Degenerate case: no trigger steps, so no guidance ever exists.
    auto empty = cfg;
    empty.advisor.trigger_steps = std::vector<std::uint64_t>{};
    auto plain = cfg;
    plain.algorithm = Algorithm::Sac;
    harness::Trainer a(empty, 1);
    harness::Trainer b(plain, 1);
    bool identical = true;
    while (a.steps_done() < cfg.max_steps) identical &= a.step() == b.step();
    identical &= a.agent() == b.agent();

    // Live run: fork at the cutoff; both continue without shaping.
    harness::Trainer shaped(cfg, 2);
    bool shaped_early = false;
    while (shaped.steps_done() < cfg.shaping.cutoff) shaped_early |= shaped.step().shaping_applied;
    harness::Trainer fork(shaped);
    fork.set_algorithm(Algorithm::Sac);
    std::size_t loss_mismatch = 0, param_mismatch = 0;
    while (shaped.steps_done() < cfg.max_steps) {
        const auto x = shaped.step();
        const auto y = fork.step();
        loss_mismatch += !(x.actor_loss == y.actor_loss && x.critic == y.critic && !x.shaping_applied);
        param_mismatch += !(shaped.agent() == fork.agent());
    }
    const bool pass = identical && shaped_early && shaped.guidance().size() > 0 && loss_mismatch == 0 &&
                      param_mismatch == 0;
    return {pass, std::string("empty trigger set run ") + (identical ? "identical" : "DIFFERS") +
                      "; live run shaped before cutoff: " + (shaped_early ? "yes" : "no") + ", " +
                      std::to_string(cfg.max_steps - cfg.shaping.cutoff) + " post-cutoff steps with " +
                      std::to_string(loss_mismatch) + " loss and " + std::to_string(param_mismatch) +
                      " parameter mismatches"};
}

// --- 4: sample efficiency with a noisy advisor -------------------------------

Outcome sample_efficiency(const Context& ctx) {
    bool pass = true;
    std::string detail;
    for (const auto& [name, file] : {std::pair{"grid", "grid_sample_efficiency.json"},
                                     std::pair{"chain", "chain_sample_efficiency.json"}}) {
        auto cfg = load(ctx, file);
        std::map<Algorithm, harness::RunSummary> s;
        for (const auto algo : {Algorithm::Varl, Algorithm::Sac}) {
            cfg.algorithm = algo;
            const std::string dir = std::string("c4_") + name + "_" + harness::algorithm_name(algo);
            run(ctx, cfg, dir);
            s[algo] = harness::summarize_run(ctx.runs / dir);
        }
        const auto& v = s[Algorithm::Varl];
        const auto& b = s[Algorithm::Sac];
        const bool ratio_ok = v.seeds.size() >= 5 && v.median_steps <= 0.5 * b.median_steps;
        pass &= ratio_ok;
        if (!detail.empty()) detail += "; ";
        detail += std::string(name) + ": varl median " + fmt(v.median_steps, 6) + " " + steps_list(v) +
                  " vs sac " + fmt(b.median_steps, 6) + " " + steps_list(b);
        if (std::string(name) == "chain") {
            const std::size_t sac_failed = b.seeds.size() - b.reached;
            pass &= sac_failed >= 3;
            detail += ", sac failed on " + std::to_string(sac_failed) + "/" + std::to_string(b.seeds.size());
        }
    }
    return {pass, detail};
}

// --- 5: robustness to a coin-flip advisor ------------------------------------

/// Fraction of non-goal cells where the deterministic policy picks a
/// value-iteration optimal action.
double vi_agreement(const ExperimentConfig& cfg, std::uint64_t seed, const sac::SacAgent& agent) {
    auto env = envs::make_env(cfg.env, cfg.env_options, harness::derive_seed(seed, harness::Stream::Instance));
    const auto& grid = dynamic_cast<const envs::SparseGridWorld&>(*env);
    const auto q = testing::optimal_q(testing::grid_model(grid.size(), grid.goal().x, grid.goal().y), cfg.agent.sac.gamma);
    const auto best = testing::greedy_sets(q);
    std::mt19937_64 unused(0);
    std::size_t match = 0, total = 0;
    for (int y = 0; y < grid.size(); ++y) {
        for (int x = 0; x < grid.size(); ++x) {
            if (x == grid.goal().x && y == grid.goal().y) continue;
            ++total;
            const auto a = std::get<std::size_t>(agent.act(grid.observe({x, y}), sac::ActMode::Deterministic, unused));
            const auto& ok = best[static_cast<std::size_t>(x + grid.size() * y)];
            match += std::find(ok.begin(), ok.end(), a) != ok.end();
        }
    }
    return static_cast<double>(match) / static_cast<double>(total);
}

Outcome biased_advisor(const Context& ctx) {
    const auto cfg = load(ctx, "grid_biased_advisor.json");
    run(ctx, cfg, "c5_biased");
    const auto dir = ctx.runs / "c5_biased";
    const auto s = harness::summarize_run(dir);
    auto env = envs::make_env(cfg.env, cfg.env_options, 0);
    bool policies_ok = true;
    std::string agreement;
    for (const auto seed : cfg.seeds) {
        sac::SacAgent agent(env->spec().state_dim, env->spec().action_space, cfg.agent.sac, 0);
        agent.import_tensors(numerics::load_checkpoint(harness::checkpoint_path(dir, seed)));
        const double frac = vi_agreement(cfg, seed, agent);
        policies_ok &= frac >= 0.95;
        agreement += (agreement.empty() ? "" : " ") + fmt(frac);
    }
    const bool pass = s.reached >= 4 && policies_ok;
    return {pass, "reached threshold on " + std::to_string(s.reached) + "/" + std::to_string(s.seeds.size()) +
                      " seeds " + steps_list(s) + ", value-iteration agreement [" + agreement + "] (>= 0.95)"};
}

// --- 6: query budget ---------------------------------------------------------

Outcome query_ledger(const Context& ctx) {
    auto cfg = load(ctx, "default.json");
    cfg.seeds = {0};
    cfg.max_steps = 3500;  // past the last trigger of the default schedule
    cfg.eval_every = 3500;
    cfg.eval_episodes = 1;
    run(ctx, cfg, "c6_varl");
    cfg.algorithm = Algorithm::Sac;
    run(ctx, cfg, "c6_sac");

    const auto t0 = std::chrono::steady_clock::now();
    const auto varl = harness::read_ledgers(ctx.runs / "c6_varl");
    const auto sac = harness::read_ledgers(ctx.runs / "c6_sac");
    const std::string v = harness::format_ledger_report(harness::ledger_report(varl.at(0).second));
    const std::string b = harness::format_ledger_report(harness::ledger_report(sac.at(0).second));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = v == "(3, 500, 1500)" && b == "(0, -, 0)" && secs < 1.0;
    return {pass, "varl " + v + ", sac " + b + ", post-processing " + fmt(secs) + " s"};
}

// --- 7: guidance-weight sweep ------------------------------------------------

Outcome lambda_sweep(const Context& ctx) {
    auto cfg = load(ctx, "grid_lambda_sweep.json");
    const auto dir = ctx.runs / "c7_lambda_sweep";
    fs::remove_all(dir);
    std::map<double, double> final_success;
    bool finite = true;
    std::string detail;
    std::vector<harness::SweepOutcome> variants;
    try {
        variants = harness::run_sweep(cfg, dir, std::nullopt, ctx.verbose ? &std::clog : nullptr);
    } catch (const NumericError& e) {
        return {false, std::string("diverged: ") + e.what()};
    }
    for (const auto& v : variants) {
        for (const auto& seed : v.seeds) {
            for (const auto& r : seed.records) {
                finite &= std::isfinite(r.critic_loss) && std::isfinite(r.actor_loss) &&
                          std::isfinite(r.shaping_loss) && std::isfinite(r.entropy);
            }
        }
        const auto s = harness::summarize_run(dir / v.label);
        double mean = 0.0;
        for (double f : s.final_success) mean += f;
        final_success[v.config.shaping.lambda] = mean / static_cast<double>(s.final_success.size());
    }
    const bool swept = final_success.size() == 4 && final_success.count(1.0) && final_success.count(10.0) &&
                       final_success.count(50.0) && final_success.count(100.0);
    const double mid = std::max(final_success[10.0], final_success[50.0]);
    const bool pass = swept && finite && final_success[100.0] <= mid;
    detail += "final success";
    for (const auto& [lambda, f] : final_success) detail += " lambda=" + fmt(lambda) + ":" + fmt(f);
    detail += finite ? ", all losses finite" : ", NON-FINITE losses";
    return {pass, detail};
}

// --- 8: critic on the two-state MDP ------------------------------------------

Outcome tiny_critic(const Context& ctx) {
    const auto cfg = load(ctx, "tiny_critic.json");
    const auto exact = testing::optimal_q(testing::tiny_model(), cfg.agent.sac.gamma);
    double worst = 0.0;
    for (const auto seed : cfg.seeds) {
        harness::Trainer trainer(cfg, seed);
        trainer.run();
        for (std::size_t s = 0; s < 2; ++s) {
            const auto q = trainer.agent().min_q_all(envs::TinyMDP::observe(s));
            for (std::size_t a = 0; a < 2; ++a) worst = std::max(worst, std::abs(q[a] - exact[s][a]));
        }
    }
    return {worst <= 0.05, "max |Q - Q*| = " + fmt(worst) + " (<= 0.05) over " + std::to_string(cfg.seeds.size()) +
                               " seed(s)"};
}

// --- 9: advisor protocol against the bundled mock server ---------------------

Outcome advisor_protocol(const Context&) {
    using namespace advisor;
    auto env = envs::make_env("SparseGridWorld", {}, 2);
    const auto s = env->reset(0);
    const envs::Action prior{std::size_t{0}};
    auto config = [](const std::string& url) {
        RemoteConfig c;
        c.endpoint = url;
        c.timeout_seconds = 2.0;
        c.retries = 2;
        c.parallelism = 1;
        return c;
    };
    auto one_pair = [&](const buffers::Transition& t) {
        buffers::ReplayBuffer replay(4, env->spec().action_space);
        replay.push(t);
        return replay;
    };
    const buffers::Transition t{s, prior, 0.0, s, false, false};
    std::vector<std::string> failed;

    {
        MockAdvisorServer server({MockMode::Fixed, "action: east", nullptr, 0});
        server.start();
        RemoteAdvisor adv(env->clone(), config(server.url()));
        const auto a = adv.advise_one(s, prior);
        if (!(a.status == AdviceStatus::Ok && std::get<std::size_t>(*a.action) == 2)) failed.push_back("round-trip");
        const auto again = adv.advise_one(s, prior);
        if (!(again.status == AdviceStatus::Ok && server.hits() == 1 && adv.counters().cache_hits == 1)) {
            failed.push_back("cache");
        }
    }
    {
        MockAdvisorServer server({MockMode::Fixed, "action: 7", nullptr, 0});
        server.start();
        RemoteAdvisor adv(env->clone(), config(server.url()));
        auto replay = one_pair(t);
        buffers::GuidanceBuffer guidance(env->spec().action_space);
        QueryLedger ledger;
        run_trigger({{1}, 1}, 1, replay, adv, guidance, ledger);
        if (!(guidance.empty() && ledger.batches.at(0).parse_failures == 1)) failed.push_back("out-of-space");
    }
    {
        MockAdvisorServer server({MockMode::Fixed, "action: north", nullptr, 2});
        server.start();
        RemoteAdvisor adv(env->clone(), config(server.url()));
        const auto a = adv.advise_one(s, prior);
        if (!(a.status == AdviceStatus::Ok && server.hits() == 3)) failed.push_back("retry");
    }
    {
        MockAdvisorServer server({MockMode::Fixed, "action: north", nullptr, 1000});
        server.start();
        RemoteAdvisor adv(env->clone(), config(server.url()));
        auto replay = one_pair(t);
        buffers::GuidanceBuffer guidance(env->spec().action_space);
        QueryLedger ledger;
        const auto added = run_trigger({{1}, 1}, 1, replay, adv, guidance, ledger);
        if (!(added == 0 && ledger.batches.at(0).transport_failures == 1 && server.hits() == 3)) {
            failed.push_back("retry-then-skip");
        }
    }
    std::string detail = "round-trip, out-of-space rejection, cache hit, retry, retry-then-skip";
    if (!failed.empty()) {
        detail = "failed:";
        for (const auto& f : failed) detail += " " + f;
    }
    return {failed.empty(), detail};
}

// --- 10: replay ring against a shadow list -----------------------------------

Outcome buffer_semantics(const Context&) {
    std::mt19937_64 rng(4242);
    const envs::ActionSpace space = envs::DiscreteSpace{3, {}};
    std::size_t ops = 0, mismatches = 0, evictions = 0;
    for (const std::size_t capacity : {1, 2, 3, 7, 16, 61}) {
        buffers::ReplayBuffer ring(capacity, space);
        std::deque<double> shadow;  // newest at the back
        int counter = 0;
        for (int i = 0; i < 1700; ++i, ++ops) {
            if (rng() % 3 != 0) {
                buffers::Transition t{{static_cast<double>(counter)}, std::size_t{static_cast<std::size_t>(counter % 3)},
                                      0.0, {static_cast<double>(counter)}, false, false};
                ++counter;
                ring.push(t);
                shadow.push_back(t.state[0]);
                if (shadow.size() > capacity) {
                    shadow.pop_front();
                    ++evictions;
                }
            } else {
                const std::size_t k = rng() % (capacity + 3);
                const auto got = ring.recent(k);
                const std::size_t want = std::min(k, shadow.size());
                bool ok = got.size() == want && ring.size() == shadow.size();
                for (std::size_t j = 0; ok && j < want; ++j) ok = got[j].state[0] == shadow[shadow.size() - 1 - j];
                mismatches += !ok;
            }
        }
    }
    return {ops >= 10000 && mismatches == 0, std::to_string(ops) + " operations over 6 capacities (" +
                                                 std::to_string(evictions) + " evictions), " + std::to_string(mismatches) +
                                                 " mismatches"};
}

struct Criterion {
    int id;
    std::string name;
    double limit_seconds;
    std::function<Outcome(const Context&)> check;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks"};
    std::vector<int> only;
    Context ctx;
    std::string configs = VARL_CONFIG_DIR;
    std::string runs = "acceptance_runs";
    app.add_option("--only", only, "Criteria to run (default: all)")->delimiter(',');
    app.add_option("--configs", configs, "Directory of experiment configurations");
    app.add_option("--runs", runs, "Directory for run outputs");
    app.add_flag("--verbose", ctx.verbose, "Log evaluation progress");
    CLI11_PARSE(app, argc, argv);
    ctx.configs = configs;
    ctx.runs = runs;

    const std::vector<Criterion> criteria{
        {1, "gradient correctness", 60, gradient_correctness},
        {2, "gate oracle equivalence", 60, gate_equivalence},
        {3, "cutoff exactness", 300, cutoff_exactness},
        {4, "sample efficiency", 1800, sample_efficiency},
        {5, "biased-advisor robustness", 1200, biased_advisor},
        {6, "query-budget ledger", 300, query_ledger},
        {7, "lambda ablation shape", 3600, lambda_sweep},
        {8, "tiny-MDP critic", 120, tiny_critic},
        {9, "advisor protocol", 60, advisor_protocol},
        {10, "buffer semantics", 60, buffer_semantics},
    };

    bool all = true;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check(ctx);
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.limit_seconds;
        const bool pass = o.pass && in_time;
        all &= pass;
        std::cout << "criterion " << c.id << " (" << c.name << "): " << (pass ? "PASS" : "FAIL") << " - " << o.detail
                  << " [" << fmt(secs, 4) << " s of " << c.limit_seconds << (in_time ? "" : ", OVER TIME") << "]"
                  << std::endl;
    }
    return all ? 0 : 1;
}
