#include "varl/buffers/buffers.hpp"

#include <cmath>
#include <ostream>

#include "json.hpp"

#include "varl/errors.hpp"

namespace varl::buffers {
namespace {

void require_finite_vec(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) throw ValidationError(std::string("transition has non-finite ") + what);
    }
}

nlohmann::json action_json(const envs::Action& a) {
    if (const auto* d = std::get_if<std::size_t>(&a)) return *d;
    return std::get<std::vector<double>>(a);
}

}  // namespace

ReplayBuffer::ReplayBuffer(std::size_t capacity, envs::ActionSpace space)
    : capacity_(capacity), space_(std::move(space)) {
    if (capacity_ == 0) throw ConfigError("replay capacity must be positive");
    envs::validate_space(space_);
    ring_.reserve(std::min<std::size_t>(capacity_, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
    require_finite_vec(t.state, "state");
    require_finite_vec(t.next_state, "next state");
    if (!std::isfinite(t.reward)) throw ValidationError("transition has non-finite reward");
    envs::require_contains(space_, t.action);
    if (ring_.size() < capacity_) {
        ring_.push_back(std::move(t));
    } else {
        ring_[cursor_] = std::move(t);
    }
    cursor_ = (cursor_ + 1) % capacity_;
    size_ = std::min(size_ + 1, capacity_);
}

const Transition& ReplayBuffer::by_age(std::size_t age) const {
    // cursor_ points one past the newest item, modulo capacity.
    const std::size_t idx = (cursor_ + capacity_ - 1 - age) % capacity_;
    return ring_[idx];
}

std::vector<Transition> ReplayBuffer::recent(std::size_t k) const {
    const std::size_t n = std::min(k, size_);
    std::vector<Transition> out;
    out.reserve(n);
    for (std::size_t age = 0; age < n; ++age) out.push_back(by_age(age));
    return out;
}

std::vector<Transition> ReplayBuffer::sample_uniform(std::size_t batch, std::mt19937_64& rng) const {
    if (size_ == 0) throw Error("cannot sample from an empty replay buffer");
    std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
    std::vector<Transition> out;
    out.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i) out.push_back(ring_[pick(rng)]);
    return out;
}

std::vector<Transition> ReplayBuffer::items() const {
    std::vector<Transition> out;
    out.reserve(size_);
    for (std::size_t age = size_; age-- > 0;) out.push_back(by_age(age));
    return out;
}

void ReplayBuffer::dump(std::ostream& out) const {
    for (const auto& t : items()) {
        nlohmann::json j{{"s", t.state},          {"a", action_json(t.action)}, {"r", t.reward},
                         {"s_next", t.next_state}, {"terminal", t.terminal},     {"truncated", t.truncated}};
        out << j.dump() << '\n';
    }
}

GuidanceBuffer::GuidanceBuffer(envs::ActionSpace space, std::optional<std::size_t> capacity)
    : space_(std::move(space)), capacity_(capacity) {
    envs::validate_space(space_);
    if (capacity_ && *capacity_ == 0) throw ConfigError("guidance capacity must be positive");
}

void GuidanceBuffer::push(std::vector<double> state, envs::Action action) {
    envs::require_contains(space_, action);
    for (double x : state) {
        if (!std::isfinite(x)) throw ValidationError("guidance state has non-finite entries");
    }
    GuidancePair pair{std::move(state), std::move(action), {}};
    if (const auto* box = std::get_if<envs::BoxSpace>(&space_)) {
        const auto unit = envs::to_unit(*box, std::get<std::vector<double>>(pair.action));
        pair.presquash.resize(unit.size());
        for (std::size_t i = 0; i < unit.size(); ++i) {
            double y = unit[i];
            if (std::abs(y) > kSquashClamp) {
                y = std::copysign(kSquashClamp, y);
                ++clamped_;
            }
            pair.presquash[i] = std::atanh(y);
        }
    }
    if (capacity_ && pairs_.size() == *capacity_) {
        pairs_[next_evict_] = std::move(pair);
        next_evict_ = (next_evict_ + 1) % *capacity_;
    } else {
        pairs_.push_back(std::move(pair));
    }
}

std::vector<GuidancePair> GuidanceBuffer::sample(std::size_t batch, std::mt19937_64& rng) const {
    if (pairs_.empty()) return {};
    std::uniform_int_distribution<std::size_t> pick(0, pairs_.size() - 1);
    std::vector<GuidancePair> out;
    out.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i) out.push_back(pairs_[pick(rng)]);
    return out;
}

}  // namespace varl::buffers
