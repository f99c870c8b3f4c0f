#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "varl/envs/environment.hpp"

namespace varl::advisor {

/// Everything an advisor sees for one (state, prior action) query.
struct AdvisorRequest {
    std::string environment;
    std::string task_description;
    std::string state_rendering;
    std::string prior_action;  // rendered in the answer grammar
    std::string constraints;

    bool operator==(const AdvisorRequest&) const = default;
};

AdvisorRequest make_request(const envs::Environment& env, std::span<const double> state,
                            const envs::Action& prior_action);

/// Value part of the answer grammar: a label for discrete spaces, a
/// bracketed vector for boxes.
std::string render_answer_value(const envs::ActionSpace& space, const envs::Action& action);

/// Action-space constraints and the answer-format instruction.
std::string render_constraints(const envs::ActionSpace& space);

/// Deterministic prompt with TASK, CONTEXT and CONSTRAINTS sections.
std::string render_prompt(const AdvisorRequest& request);

/// Follow-up prompt sent once when a reply could not be parsed.
std::string render_repair_prompt(const std::string& prompt, const std::string& bad_reply);

enum class ParseStatus { Ok, NoAnswerLine, Malformed, OutOfSpace };

struct ParseResult {
    ParseStatus status = ParseStatus::NoAnswerLine;
    std::optional<envs::Action> action;
};

/// Reads the last `action: ...` line of a completion. Discrete answers may
/// name a label (case-insensitive) or an index; box answers are bracketed
/// vectors of the right length within bounds.
ParseResult parse_action(std::string_view completion, const envs::ActionSpace& space);

/// Parses the "state: [...]" line of a rendered state.
std::optional<std::vector<double>> parse_state_line(std::string_view text);

/// Returns the value of the first "<key>: value" line, if any.
std::optional<std::string> find_field(std::string_view text, std::string_view key);

}  // namespace varl::advisor
