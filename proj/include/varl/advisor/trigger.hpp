#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "varl/advisor/advisor.hpp"
#include "varl/buffers/buffers.hpp"

namespace varl::advisor {

/// Global steps at which the advisor is asked about the K most recent
/// transitions.
struct TriggerSchedule {
    std::vector<std::uint64_t> steps;  // sorted, unique, all >= 1
    std::size_t recent = 500;          // K

    bool contains(std::uint64_t step) const;

    /// Throws ConfigError unless the invariants hold.
    void validate() const;

    /// max(K, round(f * cutoff)) for each fraction, deduplicated.
    static TriggerSchedule spread(std::uint64_t cutoff, std::size_t recent, const std::vector<double>& fractions);

    bool operator==(const TriggerSchedule&) const = default;
};

inline const std::vector<double> kDefaultTriggerFractions{0.05, 0.25, 0.5};

struct TriggerRecord {
    std::uint64_t step = 0;
    std::size_t requested = 0;  // min(K, replay size)
    std::size_t added = 0;
    std::size_t parse_failures = 0;
    std::size_t transport_failures = 0;
    std::size_t rejected = 0;  // parsed but refused by the guidance buffer

    bool operator==(const TriggerRecord&) const = default;
};

/// Advisor usage over a run, at both the trigger-batch and per-sample level.
struct QueryLedger {
    std::vector<TriggerRecord> batches;

    std::size_t trigger_batches() const { return batches.size(); }
    std::size_t total_requested() const;
    std::size_t total_added() const;
    /// The common batch size when all batches agree, else 0.
    std::size_t uniform_batch_size() const;
};

/// Algorithm step: when `step` is a trigger step, asks the advisor about
/// replay.recent(K) and appends every valid answer to `guidance`. Returns
/// the number of pairs added (0 and no advisor call otherwise).
std::size_t run_trigger(const TriggerSchedule& schedule, std::uint64_t step, const buffers::ReplayBuffer& replay,
                        Advisor& advisor, buffers::GuidanceBuffer& guidance, QueryLedger& ledger);

}  // namespace varl::advisor
