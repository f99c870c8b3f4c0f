#include "varl/harness/trainer.hpp"

#include <cmath>

#include "varl/advisor/remote.hpp"
#include "varl/envs/registry.hpp"
#include "varl/errors.hpp"
#include "varl/shaping/shaping.hpp"

namespace varl::harness {

using nlohmann::json;

std::uint64_t derive_seed(std::uint64_t seed, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), 0x7661726cU};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

std::mt19937_64 make_stream(std::uint64_t seed, Stream stream) { return std::mt19937_64(derive_seed(seed, stream)); }

json metrics_to_json(const MetricsRecord& r) {
    return json{
        {"step", r.step},
        {"eval_return", r.eval_return},
        {"eval_success", r.eval_success},
        {"eval_length", r.eval_length},
        {"train_return", r.train_return ? json(*r.train_return) : json(nullptr)},
        {"train_episodes", r.train_episodes},
        {"entropy", r.entropy},
        {"alpha", r.alpha},
        {"critic_loss", r.critic_loss},
        {"actor_loss", r.actor_loss},
        {"gate_rate", r.gate_rate},
        {"shaping_loss", r.shaping_loss},
        {"guidance_size", r.guidance_size},
        {"trigger_batches", r.trigger_batches},
        {"advisor",
         {{"queries", r.advisor.queries},
          {"network_requests", r.advisor.network_requests},
          {"cache_hits", r.advisor.cache_hits},
          {"parse_failures", r.advisor.parse_failures},
          {"transport_failures", r.advisor.transport_failures},
          {"repairs", r.advisor.repairs}}},
        {"oracle_return", r.oracle_return},
        {"wall_seconds", r.wall_seconds},
    };
}

MetricsRecord metrics_from_json(const json& j) {
    try {
        MetricsRecord r;
        r.step = j.at("step").get<std::uint64_t>();
        r.eval_return = j.at("eval_return").get<double>();
        r.eval_success = j.at("eval_success").get<double>();
        r.eval_length = j.value("eval_length", 0.0);
        if (j.contains("train_return") && !j["train_return"].is_null()) r.train_return = j["train_return"].get<double>();
        r.train_episodes = j.value("train_episodes", std::uint64_t{0});
        r.entropy = j.value("entropy", 0.0);
        r.alpha = j.value("alpha", 0.0);
        r.critic_loss = j.value("critic_loss", 0.0);
        r.actor_loss = j.value("actor_loss", 0.0);
        r.gate_rate = j.value("gate_rate", 0.0);
        r.shaping_loss = j.value("shaping_loss", 0.0);
        r.guidance_size = j.value("guidance_size", std::uint64_t{0});
        r.trigger_batches = j.value("trigger_batches", std::uint64_t{0});
        if (j.contains("advisor")) {
            const auto& a = j["advisor"];
            r.advisor.queries = a.value("queries", std::uint64_t{0});
            r.advisor.network_requests = a.value("network_requests", std::uint64_t{0});
            r.advisor.cache_hits = a.value("cache_hits", std::uint64_t{0});
            r.advisor.parse_failures = a.value("parse_failures", std::uint64_t{0});
            r.advisor.transport_failures = a.value("transport_failures", std::uint64_t{0});
            r.advisor.repairs = a.value("repairs", std::uint64_t{0});
        }
        r.oracle_return = j.value("oracle_return", 0.0);
        r.wall_seconds = j.value("wall_seconds", 0.0);
        return r;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed metrics record: ") + e.what());
    }
}

std::unique_ptr<advisor::Advisor> make_advisor(const ExperimentConfig& config, std::uint64_t seed) {
    auto env = envs::make_env(config.env, config.env_options, derive_seed(seed, Stream::Instance));
    if (config.advisor.kind == AdvisorKind::Remote) {
        return std::make_unique<advisor::RemoteAdvisor>(std::move(env), config.advisor.remote);
    }
    return std::make_unique<advisor::ScriptedAdvisor>(std::move(env), config.advisor.quality,
                                                      derive_seed(seed, Stream::Advisor));
}

Trainer::Trainer(ExperimentConfig config, std::uint64_t seed, std::unique_ptr<advisor::Advisor> advisor)
    : config_(std::move(config)),
      seed_(seed),
      schedule_((config_.validate(), config_.schedule())),
      env_(envs::make_env(config_.env, config_.env_options, derive_seed(seed, Stream::Instance))),
      eval_env_(env_->clone()),
      agent_(env_->spec().state_dim, env_->spec().action_space, config_.agent.sac, derive_seed(seed, Stream::Init)),
      replay_(config_.agent.replay_capacity, env_->spec().action_space),
      guidance_(env_->spec().action_space),
      advisor_(std::move(advisor)),
      env_rng_(make_stream(seed, Stream::Env)),
      explore_rng_(make_stream(seed, Stream::Explore)),
      agent_rng_(make_stream(seed, Stream::Agent)),
      replay_rng_(make_stream(seed, Stream::Replay)),
      guidance_rng_(make_stream(seed, Stream::Guidance)),
      started_(std::chrono::steady_clock::now()) {
    if (config_.algorithm == Algorithm::Varl && !advisor_) advisor_ = make_advisor(config_, seed);

    auto eval_rng = make_stream(seed, Stream::Eval);
    for (std::size_t i = 0; i < config_.eval_episodes; ++i) eval_seeds_.push_back(eval_rng());

    double total = 0.0;
    for (const auto s : eval_seeds_) {
        auto state = eval_env_->reset(s);
        while (!eval_env_->episode_done()) {
            const auto r = eval_env_->step(eval_env_->oracle_action(state));
            total += r.reward;
            state = r.next_state;
        }
    }
    oracle_return_ = total / static_cast<double>(eval_seeds_.size());

    if (config_.algorithm == Algorithm::SacExpertPrefill) prefill_expert(config_.expert_episodes);
    start_episode();
}

Trainer::Trainer(const Trainer& other)
    : config_(other.config_),
      seed_(other.seed_),
      schedule_(other.schedule_),
      env_(other.env_->clone()),
      eval_env_(other.eval_env_->clone()),
      agent_(other.agent_),
      replay_(other.replay_),
      guidance_(other.guidance_),
      advisor_(other.advisor_ ? other.advisor_->clone() : nullptr),
      ledger_(other.ledger_),
      env_rng_(other.env_rng_),
      explore_rng_(other.explore_rng_),
      agent_rng_(other.agent_rng_),
      replay_rng_(other.replay_rng_),
      guidance_rng_(other.guidance_rng_),
      eval_seeds_(other.eval_seeds_),
      oracle_return_(other.oracle_return_),
      t_(other.t_),
      state_(other.state_),
      episode_return_(other.episode_return_),
      window_train_return_(other.window_train_return_),
      window_episodes_(other.window_episodes_),
      window_critic_(other.window_critic_),
      window_actor_(other.window_actor_),
      window_entropy_(other.window_entropy_),
      window_updates_(other.window_updates_),
      window_gate_active_(other.window_gate_active_),
      window_gate_batch_(other.window_gate_batch_),
      window_shaping_(other.window_shaping_),
      window_shaped_(other.window_shaped_),
      records_(other.records_),
      started_(other.started_) {}

void Trainer::start_episode() {
    state_ = env_->reset(env_rng_());
    episode_return_ = 0.0;
}

std::size_t Trainer::prefill_expert(std::size_t episodes) {
    auto rng = make_stream(seed_, Stream::Expert);
    auto env = env_->clone();
    std::size_t successes = 0;
    for (std::size_t e = 0; e < episodes; ++e) {
        auto state = env->reset(rng());
        bool success = false;
        while (!env->episode_done()) {
            const auto action = env->oracle_action(state);
            const auto r = env->step(action);
            replay_.push({state, action, r.reward, r.next_state, r.terminal(), r.truncated});
            success = success || r.success;
            state = r.next_state;
        }
        if (success) ++successes;
    }
    return successes;
}

StepInfo Trainer::step() {
    StepInfo info;
    info.step = ++t_;

    const envs::Action action = t_ <= config_.agent.warmup_steps
                                    ? envs::sample_uniform(env_->spec().action_space, explore_rng_)
                                    : agent_.act(state_, sac::ActMode::Stochastic, explore_rng_);
    const auto result = env_->step(action);
    replay_.push({state_, action, result.reward, result.next_state, result.terminal(), result.truncated});
    episode_return_ += result.reward;
    if (result.done) {
        info.episode_ended = true;
        window_train_return_ += episode_return_;
        ++window_episodes_;
        start_episode();
    } else {
        state_ = result.next_state;
    }

    const bool shaped = config_.algorithm == Algorithm::Varl;
    if (shaped && advisor_) info.guidance_added = advisor::run_trigger(schedule_, t_, replay_, *advisor_, guidance_, ledger_);

    if (t_ > config_.agent.warmup_steps && replay_.size() >= config_.agent.sac.batch_size) {
        info.learned = true;
        const auto batch = replay_.sample_uniform(config_.agent.sac.batch_size, replay_rng_);
        info.critic = agent_.critic_update(batch, agent_rng_);

        numerics::Matrix states(batch.size(), agent_.state_dim());
        for (std::size_t i = 0; i < batch.size(); ++i) {
            std::copy(batch[i].state.begin(), batch[i].state.end(), states.row(i).begin());
        }
        std::optional<numerics::Matrix> noise;
        if (!agent_.discrete()) noise = agent_.sample_noise(batch.size(), agent_rng_);
        const numerics::Matrix* noise_ptr = noise ? &*noise : nullptr;

        std::vector<buffers::GuidancePair> pairs;
        if (shaped && t_ <= config_.shaping.cutoff && !guidance_.empty()) {
            pairs = guidance_.sample(config_.shaping.guidance_batch, guidance_rng_);
        }
        const auto loss = shaping::actor_loss(agent_, config_.shaping, t_, states, noise_ptr, pairs);
        if (!std::isfinite(loss.total.loss)) throw NumericError("non-finite actor loss at step " + std::to_string(t_));
        agent_.apply_actor_gradient(loss.total.grad);
        info.actor_loss = loss.total.loss;
        info.baseline_loss = loss.baseline_loss;
        info.shaping_applied = loss.shaping_applied;
        info.gate_active = loss.shaping.active;
        info.gate_batch = loss.shaping.batch;
        info.shaping_loss = loss.shaping.term.loss;
        info.entropy = agent_.update_alpha(states, noise_ptr);
        agent_.update_targets();

        window_critic_ += 0.5 * (info.critic.loss1 + info.critic.loss2);
        window_actor_ += info.actor_loss;
        window_entropy_ += info.entropy;
        ++window_updates_;
        if (info.shaping_applied) {
            window_gate_active_ += info.gate_active;
            window_gate_batch_ += info.gate_batch;
            window_shaping_ += info.shaping_loss;
            ++window_shaped_;
        }
    }
    return info;
}

EvalResult Trainer::evaluate() const {
    auto env = eval_env_->clone();
    std::mt19937_64 unused(0);
    EvalResult out;
    for (const auto s : eval_seeds_) {
        auto state = env->reset(s);
        double ret = 0.0;
        bool success = false;
        while (!env->episode_done()) {
            const auto r = env->step(agent_.act(state, sac::ActMode::Deterministic, unused));
            ret += r.reward;
            success = success || r.success;
            state = r.next_state;
        }
        out.mean_return += ret;
        out.success_rate += success ? 1.0 : 0.0;
        out.mean_length += static_cast<double>(env->elapsed_steps());
    }
    const double n = static_cast<double>(eval_seeds_.size());
    out.mean_return /= n;
    out.success_rate /= n;
    out.mean_length /= n;
    return out;
}

MetricsRecord Trainer::make_record() {
    const auto eval = evaluate();
    MetricsRecord r;
    r.step = t_;
    r.eval_return = eval.mean_return;
    r.eval_success = eval.success_rate;
    r.eval_length = eval.mean_length;
    if (window_episodes_ > 0) r.train_return = window_train_return_ / static_cast<double>(window_episodes_);
    r.train_episodes = window_episodes_;
    const double updates = static_cast<double>(std::max<std::uint64_t>(window_updates_, 1));
    r.entropy = window_entropy_ / updates;
    r.critic_loss = window_critic_ / updates;
    r.actor_loss = window_actor_ / updates;
    r.alpha = agent_.alpha();
    r.gate_rate = window_gate_batch_ == 0
                      ? 0.0
                      : static_cast<double>(window_gate_active_) / static_cast<double>(window_gate_batch_);
    r.shaping_loss = window_shaped_ == 0 ? 0.0 : window_shaping_ / static_cast<double>(window_shaped_);
    r.guidance_size = guidance_.size();
    r.trigger_batches = ledger_.trigger_batches();
    if (advisor_) r.advisor = advisor_->counters();
    r.oracle_return = oracle_return_;
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();

    window_train_return_ = 0.0;
    window_episodes_ = 0;
    window_critic_ = window_actor_ = window_entropy_ = window_shaping_ = 0.0;
    window_updates_ = window_gate_active_ = window_gate_batch_ = window_shaped_ = 0;
    return r;
}

void Trainer::run(const std::function<void(const MetricsRecord&)>& on_record) {
    while (t_ < config_.max_steps) {
        step();
        if (t_ % config_.eval_every == 0 || t_ == config_.max_steps) {
            records_.push_back(make_record());
            if (on_record) on_record(records_.back());
        }
    }
}

}  // namespace varl::harness
