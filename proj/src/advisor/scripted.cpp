#include "varl/advisor/advisor.hpp"

#include <algorithm>

#include "varl/errors.hpp"

namespace varl::advisor {

ScriptedAdvisor::ScriptedAdvisor(std::unique_ptr<envs::Environment> env, ScriptedQuality quality, std::uint64_t seed)
    : env_(std::move(env)), quality_(std::move(quality)), rng_(seed) {
    if (!env_) throw ConfigError("scripted advisor needs an environment");
    if (!(quality_.accuracy >= 0.0 && quality_.accuracy <= 1.0)) {
        throw ConfigError("advisor accuracy must lie in [0, 1]");
    }
    if (!(quality_.noise >= 0.0)) throw ConfigError("advisor noise must be non-negative");
    if (const auto* box = std::get_if<envs::BoxSpace>(&env_->spec().action_space)) {
        if (!quality_.bias.empty() && quality_.bias.size() != box->dim()) {
            throw ConfigError("advisor bias must have one entry per action dimension");
        }
    }
}

envs::Action ScriptedAdvisor::advise_one(std::span<const double> state) {
    const envs::Action oracle = env_->oracle_action(state);
    const auto& space = env_->spec().action_space;
    if (const auto* d = std::get_if<envs::DiscreteSpace>(&space)) {
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        std::uniform_int_distribution<std::size_t> other(0, d->n - 2);
        const bool correct = coin(rng_) < quality_.accuracy;
        std::size_t pick = other(rng_);
        if (correct) return oracle;
        const std::size_t best = std::get<std::size_t>(oracle);
        if (pick >= best) ++pick;
        return pick;
    }
    const auto& box = std::get<envs::BoxSpace>(space);
    auto a = std::get<std::vector<double>>(oracle);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double bias = quality_.bias.empty() ? 0.0 : quality_.bias[i];
        a[i] = std::clamp(a[i] + bias + quality_.noise * normal(rng_), box.low[i], box.high[i]);
    }
    return a;
}

std::vector<Advice> ScriptedAdvisor::advise(const std::vector<buffers::Transition>& batch) {
    std::vector<Advice> out;
    out.reserve(batch.size());
    for (const auto& t : batch) {
        ++counters_.queries;
        out.push_back(Advice{AdviceStatus::Ok, advise_one(t.state)});
    }
    return out;
}

std::unique_ptr<Advisor> ScriptedAdvisor::clone() const {
    auto copy = std::make_unique<ScriptedAdvisor>(env_->clone(), quality_, 0);
    copy->rng_ = rng_;
    copy->counters_ = counters_;
    return copy;
}

}  // namespace varl::advisor
