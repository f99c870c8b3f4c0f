#include "varl/advisor/prompt.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "varl/errors.hpp"

namespace varl::advisor {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            out.push_back(text.substr(start));
            break;
        }
        out.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

std::string label_of(const envs::DiscreteSpace& d, std::size_t i) {
    return i < d.labels.size() ? d.labels[i] : std::to_string(i);
}

/// Parses "[a, b, ...]"; nullopt on any syntax problem or non-finite entry.
std::optional<std::vector<double>> parse_bracketed(std::string_view text) {
    text = trim(text);
    if (text.size() < 2 || text.front() != '[' || text.back() != ']') return std::nullopt;
    text = trim(text.substr(1, text.size() - 2));
    std::vector<double> values;
    if (text.empty()) return values;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = text.find(',', start);
        const std::string item(trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start)));
        if (item.empty()) return std::nullopt;
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(item.c_str(), &end);
        if (end != item.c_str() + item.size() || errno == ERANGE || !std::isfinite(v)) return std::nullopt;
        values.push_back(v);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return values;
}

}  // namespace

std::string render_answer_value(const envs::ActionSpace& space, const envs::Action& action) {
    envs::require_contains(space, action);
    if (const auto* d = std::get_if<envs::DiscreteSpace>(&space)) return label_of(*d, std::get<std::size_t>(action));
    return envs::format_action(action);
}

std::string render_constraints(const envs::ActionSpace& space) {
    std::ostringstream out;
    if (const auto* d = std::get_if<envs::DiscreteSpace>(&space)) {
        out << "The action space is discrete with " << d->n << " actions:\n";
        for (std::size_t i = 0; i < d->n; ++i) out << "- " << label_of(*d, i) << '\n';
        out << "Reply with exactly one line of the form `action: <label>` using one of the labels above.";
        return out.str();
    }
    const auto& box = std::get<envs::BoxSpace>(space);
    out << "The action space is continuous with " << box.dim() << " dimensions:\n";
    for (std::size_t i = 0; i < box.dim(); ++i) {
        out << "- dimension " << i << ": " << envs::format_vector(std::vector<double>{box.low[i], box.high[i]}) << '\n';
    }
    out << "Reply with exactly one line of the form `action: [";
    for (std::size_t i = 0; i < box.dim(); ++i) out << (i ? ", " : "") << 'v' << i;
    out << "]` with every value inside its bounds.";
    return out.str();
}

AdvisorRequest make_request(const envs::Environment& env, std::span<const double> state,
                            const envs::Action& prior_action) {
    const auto& space = env.spec().action_space;
    return AdvisorRequest{env.spec().name, env.task_description(), env.render_state(state),
                          render_answer_value(space, prior_action), render_constraints(space)};
}

std::string render_prompt(const AdvisorRequest& r) {
    std::ostringstream out;
    out << "TASK\n" << r.task_description << "\n\n";
    out << "CONTEXT\n";
    out << "environment: " << r.environment << '\n';
    out << r.state_rendering << '\n';
    out << "prior_action: " << r.prior_action << "\n\n";
    out << "CONSTRAINTS\n" << r.constraints << '\n';
    return out.str();
}

std::string render_repair_prompt(const std::string& prompt, const std::string& bad_reply) {
    return prompt + "\nYour previous reply could not be used:\n" + bad_reply +
           "\nReply again with exactly one line in the required format.\n";
}

ParseResult parse_action(std::string_view completion, const envs::ActionSpace& space) {
    std::optional<std::string_view> answer;
    for (std::string_view line : lines_of(completion)) {
        line = trim(line);
        if (line.size() >= 7 && lower(line.substr(0, 7)) == "action:") answer = trim(line.substr(7));
    }
    if (!answer) return {ParseStatus::NoAnswerLine, std::nullopt};
    std::string_view value = *answer;
    // Tolerate markdown quoting and a trailing full stop.
    while (!value.empty() && (value.back() == '.' || value.back() == '`' || value.back() == '"')) value.remove_suffix(1);
    while (!value.empty() && (value.front() == '`' || value.front() == '"')) value.remove_prefix(1);
    value = trim(value);
    if (value.empty()) return {ParseStatus::Malformed, std::nullopt};

    if (const auto* d = std::get_if<envs::DiscreteSpace>(&space)) {
        if (std::all_of(value.begin(), value.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            if (value.size() > 18) return {ParseStatus::OutOfSpace, std::nullopt};
            const std::size_t index = std::stoull(std::string(value));
            if (index >= d->n) return {ParseStatus::OutOfSpace, std::nullopt};
            return {ParseStatus::Ok, envs::Action{index}};
        }
        const std::string wanted = lower(value);
        for (std::size_t i = 0; i < d->labels.size(); ++i) {
            if (lower(d->labels[i]) == wanted) return {ParseStatus::Ok, envs::Action{i}};
        }
        return {ParseStatus::Malformed, std::nullopt};
    }
    const auto& box = std::get<envs::BoxSpace>(space);
    auto values = parse_bracketed(value);
    if (!values || values->size() != box.dim()) return {ParseStatus::Malformed, std::nullopt};
    envs::Action action{std::move(*values)};
    if (!envs::contains(space, action)) return {ParseStatus::OutOfSpace, std::nullopt};
    return {ParseStatus::Ok, std::move(action)};
}

std::optional<std::string> find_field(std::string_view text, std::string_view key) {
    for (std::string_view line : lines_of(text)) {
        line = trim(line);
        if (line.size() > key.size() && line.substr(0, key.size()) == key && line[key.size()] == ':') {
            return std::string(trim(line.substr(key.size() + 1)));
        }
    }
    return std::nullopt;
}

std::optional<std::vector<double>> parse_state_line(std::string_view text) {
    const auto field = find_field(text, "state");
    if (!field) return std::nullopt;
    return parse_bracketed(*field);
}

}  // namespace varl::advisor
