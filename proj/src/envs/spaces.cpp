#include "varl/envs/spaces.hpp"

#include <cmath>
#include <cstdio>

#include "varl/errors.hpp"

namespace varl::envs {

void validate_space(const ActionSpace& space) {
    if (const auto* d = std::get_if<DiscreteSpace>(&space)) {
        if (d->n < 2) throw ValidationError("discrete action space needs at least 2 actions");
        if (!d->labels.empty() && d->labels.size() != d->n) {
            throw ValidationError("discrete action labels must match the action count");
        }
        return;
    }
    const auto& box = std::get<BoxSpace>(space);
    if (box.low.empty() || box.low.size() != box.high.size()) {
        throw ValidationError("box bounds must be non-empty and of equal length");
    }
    for (std::size_t i = 0; i < box.low.size(); ++i) {
        if (!(box.low[i] < box.high[i])) throw ValidationError("box requires low < high in every dimension");
    }
}

bool contains(const ActionSpace& space, const Action& action) {
    if (const auto* d = std::get_if<DiscreteSpace>(&space)) {
        const auto* a = std::get_if<std::size_t>(&action);
        return a != nullptr && *a < d->n;
    }
    const auto& box = std::get<BoxSpace>(space);
    const auto* a = std::get_if<std::vector<double>>(&action);
    if (a == nullptr || a->size() != box.dim()) return false;
    for (std::size_t i = 0; i < a->size(); ++i) {
        const double v = (*a)[i];
        if (!std::isfinite(v) || v < box.low[i] || v > box.high[i]) return false;
    }
    return true;
}

void require_contains(const ActionSpace& space, const Action& action) {
    if (!contains(space, action)) {
        throw ValidationError("action " + format_action(action) + " lies outside the action space");
    }
}

Action sample_uniform(const ActionSpace& space, std::mt19937_64& rng) {
    if (const auto* d = std::get_if<DiscreteSpace>(&space)) {
        std::uniform_int_distribution<std::size_t> pick(0, d->n - 1);
        return pick(rng);
    }
    const auto& box = std::get<BoxSpace>(space);
    std::vector<double> a(box.dim());
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::uniform_real_distribution<double> u(box.low[i], box.high[i]);
        a[i] = u(rng);
    }
    return a;
}

std::vector<double> to_unit(const BoxSpace& box, std::span<const double> action) {
    std::vector<double> out(action.size());
    for (std::size_t i = 0; i < action.size(); ++i) {
        out[i] = 2.0 * (action[i] - box.low[i]) / (box.high[i] - box.low[i]) - 1.0;
    }
    return out;
}

std::vector<double> from_unit(const BoxSpace& box, std::span<const double> unit) {
    std::vector<double> out(unit.size());
    for (std::size_t i = 0; i < unit.size(); ++i) {
        out[i] = box.low[i] + 0.5 * (unit[i] + 1.0) * (box.high[i] - box.low[i]);
    }
    return out;
}

std::string format_vector(std::span<const double> values, int precision) {
    std::string out = "[";
    char buf[64];
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        // Normalize negative zero so renderings are stable across paths.
        const double v = values[i] == 0.0 ? 0.0 : values[i];
        std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
        out += buf;
    }
    out += "]";
    return out;
}

std::string format_action(const Action& action, int precision) {
    if (const auto* a = std::get_if<std::size_t>(&action)) return std::to_string(*a);
    return format_vector(std::get<std::vector<double>>(action), precision);
}

bool actions_equal(const Action& a, const Action& b) { return a == b; }

}  // namespace varl::envs
