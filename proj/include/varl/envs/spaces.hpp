#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace varl::envs {

struct DiscreteSpace {
    std::size_t n = 0;
    std::vector<std::string> labels;  // human-readable names, one per action

    bool operator==(const DiscreteSpace&) const = default;
};

/// Axis-aligned box; low < high in every dimension.
struct BoxSpace {
    std::vector<double> low;
    std::vector<double> high;

    std::size_t dim() const { return low.size(); }

    bool operator==(const BoxSpace&) const = default;
};

using ActionSpace = std::variant<DiscreteSpace, BoxSpace>;

/// A discrete action index or a continuous action vector.
using Action = std::variant<std::size_t, std::vector<double>>;

inline bool is_discrete(const ActionSpace& space) { return std::holds_alternative<DiscreteSpace>(space); }

/// Throws ValidationError unless n >= 2 (discrete) or low < high (box).
void validate_space(const ActionSpace& space);

bool contains(const ActionSpace& space, const Action& action);

/// Throws ValidationError with a descriptive message when !contains.
void require_contains(const ActionSpace& space, const Action& action);

Action sample_uniform(const ActionSpace& space, std::mt19937_64& rng);

/// Maps a box action affinely onto [-1, 1]^d.
std::vector<double> to_unit(const BoxSpace& box, std::span<const double> action);

/// Inverse of to_unit.
std::vector<double> from_unit(const BoxSpace& box, std::span<const double> unit);

/// Renders an action in the advisor answer grammar: "2" or "[0.250000, -1.000000]".
std::string format_action(const Action& action, int precision = 6);

/// Renders a real vector with fixed precision: "[0.500000, 1.000000]".
std::string format_vector(std::span<const double> values, int precision = 6);

bool actions_equal(const Action& a, const Action& b);

}  // namespace varl::envs
