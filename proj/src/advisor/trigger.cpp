#include "varl/advisor/trigger.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "varl/errors.hpp"

namespace varl::advisor {

bool TriggerSchedule::contains(std::uint64_t step) const {
    return std::binary_search(steps.begin(), steps.end(), step);
}

void TriggerSchedule::validate() const {
    if (recent == 0) throw ConfigError("advisor.recent (K) must be at least 1");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (steps[i] < 1) throw ConfigError("trigger steps must be >= 1");
        if (i > 0 && steps[i] <= steps[i - 1]) throw ConfigError("trigger steps must be strictly increasing");
    }
}

TriggerSchedule TriggerSchedule::spread(std::uint64_t cutoff, std::size_t recent, const std::vector<double>& fractions) {
    std::set<std::uint64_t> steps;
    for (double f : fractions) {
        if (!(f > 0.0 && f <= 1.0)) throw ConfigError("trigger fractions must lie in (0, 1]");
        const auto at = static_cast<std::uint64_t>(std::llround(f * static_cast<double>(cutoff)));
        steps.insert(std::max<std::uint64_t>(at, recent));
    }
    TriggerSchedule s{{steps.begin(), steps.end()}, recent};
    s.validate();
    return s;
}

std::size_t QueryLedger::total_requested() const {
    std::size_t n = 0;
    for (const auto& b : batches) n += b.requested;
    return n;
}

std::size_t QueryLedger::total_added() const {
    std::size_t n = 0;
    for (const auto& b : batches) n += b.added;
    return n;
}

std::size_t QueryLedger::uniform_batch_size() const {
    if (batches.empty()) return 0;
    const std::size_t first = batches.front().requested;
    for (const auto& b : batches) {
        if (b.requested != first) return 0;
    }
    return first;
}

std::size_t run_trigger(const TriggerSchedule& schedule, std::uint64_t step, const buffers::ReplayBuffer& replay,
                        Advisor& advisor, buffers::GuidanceBuffer& guidance, QueryLedger& ledger) {
    if (!schedule.contains(step)) return 0;
    TriggerRecord record;
    record.step = step;
    const auto recent = replay.recent(schedule.recent);
    record.requested = recent.size();
    if (!recent.empty()) {
        const auto advice = advisor.advise(recent);
        for (std::size_t i = 0; i < recent.size(); ++i) {
            switch (advice[i].status) {
                case AdviceStatus::Ok:
                    try {
                        guidance.push(recent[i].state, *advice[i].action);
                        ++record.added;
                    } catch (const ValidationError&) {
                        ++record.rejected;
                    }
                    break;
                case AdviceStatus::ParseFailure: ++record.parse_failures; break;
                case AdviceStatus::TransportFailure: ++record.transport_failures; break;
            }
        }
    }
    ledger.batches.push_back(record);
    return record.added;
}

}  // namespace varl::advisor
