#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "varl/buffers/buffers.hpp"
#include "varl/envs/environment.hpp"

namespace varl::advisor {

enum class AdviceStatus { Ok, ParseFailure, TransportFailure };

struct Advice {
    AdviceStatus status = AdviceStatus::Ok;
    std::optional<envs::Action> action;  // set iff status == Ok
};

struct AdvisorCounters {
    std::uint64_t queries = 0;             // (state, prior action) pairs asked about
    std::uint64_t network_requests = 0;    // HTTP exchanges, including retries and repairs
    std::uint64_t cache_hits = 0;
    std::uint64_t parse_failures = 0;
    std::uint64_t transport_failures = 0;
    std::uint64_t repairs = 0;

    bool operator==(const AdvisorCounters&) const = default;
};

/// The action generator (s, a) -> a_advice.
class Advisor {
public:
    virtual ~Advisor() = default;

    /// One answer per transition, in order. Never throws for per-item
    /// failures; those come back as non-Ok advice.
    virtual std::vector<Advice> advise(const std::vector<buffers::Transition>& batch) = 0;

    virtual const AdvisorCounters& counters() const = 0;

    /// Independent copy with the same internal state (random stream, cache).
    virtual std::unique_ptr<Advisor> clone() const = 0;
};

struct ScriptedQuality {
    double accuracy = 1.0;      // discrete: probability of the oracle action
    std::vector<double> bias;   // box: added to the oracle action (empty = zero)
    double noise = 0.0;         // box: std of Gaussian noise added per dimension

    bool operator==(const ScriptedQuality&) const = default;
};

/// Oracle-backed advisor with controllable quality. Discrete: the oracle
/// action with probability `accuracy`, otherwise a uniformly drawn other
/// action. Box: clip(oracle + bias + noise * N(0, I)) into the bounds.
class ScriptedAdvisor final : public Advisor {
public:
    ScriptedAdvisor(std::unique_ptr<envs::Environment> env, ScriptedQuality quality, std::uint64_t seed);

    envs::Action advise_one(std::span<const double> state);

    std::vector<Advice> advise(const std::vector<buffers::Transition>& batch) override;
    const AdvisorCounters& counters() const override { return counters_; }
    std::unique_ptr<Advisor> clone() const override;

private:
    std::unique_ptr<envs::Environment> env_;
    ScriptedQuality quality_;
    std::mt19937_64 rng_;
    AdvisorCounters counters_;
};

}  // namespace varl::advisor
