#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "varl/envs/spaces.hpp"

namespace varl::buffers {

/// One environment step (s, a, r, s', d). `terminal` marks a true episode
/// end; `truncated` marks a timeout, which critic targets bootstrap through.
struct Transition {
    std::vector<double> state;
    envs::Action action;
    double reward = 0.0;
    std::vector<double> next_state;
    bool terminal = false;
    bool truncated = false;

    bool done() const { return terminal || truncated; }
    bool operator==(const Transition&) const = default;
};

/// Advisor-labelled pair (s, a_llm).
struct GuidancePair {
    std::vector<double> state;
    envs::Action action;
    // Box spaces only: the action mapped to the pre-squash Gaussian space,
    // atanh(unit(a)), computed once when the pair is stored.
    std::vector<double> presquash;

    bool operator==(const GuidancePair&) const = default;
};

/// Fixed-capacity ring of transitions; evicts the oldest at capacity.
class ReplayBuffer {
public:
    ReplayBuffer(std::size_t capacity, envs::ActionSpace space);

    /// Throws ValidationError for non-finite fields or out-of-space actions.
    void push(Transition t);

    /// The min(k, size()) most recent transitions, most recent first.
    std::vector<Transition> recent(std::size_t k) const;

    /// `batch` i.i.d. uniform draws with replacement. Throws on an empty buffer.
    std::vector<Transition> sample_uniform(std::size_t batch, std::mt19937_64& rng) const;

    /// Oldest-first snapshot of the stored transitions.
    std::vector<Transition> items() const;

    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return size_ == 0; }
    const envs::ActionSpace& action_space() const { return space_; }

    /// Line-delimited JSON, oldest first. Debug aid only.
    void dump(std::ostream& out) const;

private:
    const Transition& by_age(std::size_t age) const;  // 0 = most recent

    std::size_t capacity_;
    envs::ActionSpace space_;
    std::vector<Transition> ring_;
    std::size_t cursor_ = 0;  // next slot to write
    std::size_t size_ = 0;
};

/// Store of advisor-labelled pairs. Duplicates are kept (multiset append).
class GuidanceBuffer {
public:
    explicit GuidanceBuffer(envs::ActionSpace space, std::optional<std::size_t> capacity = std::nullopt);

    /// Rejects actions outside the action space with ValidationError.
    void push(std::vector<double> state, envs::Action action);

    /// Uniform with replacement; empty result when the buffer is empty.
    std::vector<GuidancePair> sample(std::size_t batch, std::mt19937_64& rng) const;

    const std::vector<GuidancePair>& pairs() const { return pairs_; }
    std::size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }
    const envs::ActionSpace& action_space() const { return space_; }

    /// Box actions on the boundary have no finite pre-squash preimage; they are
    /// pulled just inside the open interval and counted here.
    std::size_t clamped_count() const { return clamped_; }

private:
    envs::ActionSpace space_;
    std::optional<std::size_t> capacity_;
    std::vector<GuidancePair> pairs_;
    std::size_t next_evict_ = 0;
    std::size_t clamped_ = 0;
};

/// Largest |unit action| kept before the inverse squash.
inline constexpr double kSquashClamp = 1.0 - 1e-6;

}  // namespace varl::buffers
