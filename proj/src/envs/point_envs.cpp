#include "varl/envs/point_envs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "varl/errors.hpp"

namespace varl::envs {
namespace {

Vec2 sub(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
Vec2 add(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
Vec2 scale(const Vec2& a, double k) { return {a[0] * k, a[1] * k}; }
double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
double norm(const Vec2& a) { return std::hypot(a[0], a[1]); }
Vec2 clip_arena(const Vec2& a) { return {std::clamp(a[0], -1.0, 1.0), std::clamp(a[1], -1.0, 1.0)}; }

Vec2 uniform_point(std::mt19937_64& rng, double half_width) {
    std::uniform_real_distribution<double> u(-half_width, half_width);
    const double x = u(rng);
    return {x, u(rng)};
}

BoxSpace unit_box2() { return BoxSpace{{-1.0, -1.0}, {1.0, 1.0}}; }

/// Box action that moves a point from `from` toward `to` at most one step.
std::vector<double> steer(const Vec2& from, const Vec2& to, double step) {
    return {std::clamp((to[0] - from[0]) / step, -1.0, 1.0), std::clamp((to[1] - from[1]) / step, -1.0, 1.0)};
}

std::string render_point(const Vec2& p) {
    std::string v = format_vector(std::vector<double>{p[0], p[1]});
    return "(" + v.substr(1, v.size() - 2) + ")";
}

}  // namespace

// --- PointReach -------------------------------------------------------------

PointReach::PointReach(Options options)
    : Environment(EnvSpec{"PointReach", 4, unit_box2(), options.max_episode_steps, RewardRegime::SparseEvent}),
      options_(options) {
    if (!(options_.step_size > 0.0) || !(options_.success_radius > 0.0)) {
        throw ConfigError("PointReach: step_size and success_radius must be positive");
    }
}

std::unique_ptr<PointReach> PointReach::from_options(const EnvOptions& options) {
    reject_unknown_options(options, {"step_size", "success_radius", "max_episode_steps"}, "PointReach");
    Options o;
    o.step_size = option_or(options, "step_size", o.step_size);
    o.success_radius = option_or(options, "success_radius", o.success_radius);
    o.max_episode_steps = static_cast<std::size_t>(
        option_or(options, "max_episode_steps", static_cast<double>(o.max_episode_steps)));
    return std::make_unique<PointReach>(o);
}

std::vector<double> PointReach::observe() const { return {agent_[0], agent_[1], target_[0], target_[1]}; }

std::vector<double> PointReach::on_reset(std::mt19937_64& rng) {
    agent_ = uniform_point(rng, 0.9);
    do {
        target_ = uniform_point(rng, 0.9);
    } while (norm(sub(target_, agent_)) < 0.3);
    return observe();
}

Environment::Outcome PointReach::on_step(const Action& action) {
    const auto& a = std::get<std::vector<double>>(action);
    agent_ = clip_arena(add(agent_, scale({a[0], a[1]}, options_.step_size)));
    const bool reached = norm(sub(target_, agent_)) < options_.success_radius;
    return {observe(), reached ? 1.0 : 0.0, reached};
}

Action PointReach::oracle_action(std::span<const double> state) const {
    return steer({state[0], state[1]}, {state[2], state[3]}, options_.step_size);
}

std::string PointReach::render_state(std::span<const double> state) const {
    std::ostringstream out;
    out << "state: " << format_vector(state) << '\n';
    out << "agent_position: " << render_point({state[0], state[1]}) << '\n';
    out << "target_position: " << render_point({state[2], state[3]});
    return out.str();
}

std::string PointReach::task_description() const {
    return "Move a point agent inside the square [-1, 1] x [-1, 1] to the target position. Each action is a "
           "2-D velocity command in [-1, 1] per axis; one unit moves the agent by " +
           std::to_string(options_.step_size) + ". A reward of 1 is given only when the agent reaches the target.";
}

std::unique_ptr<Environment> PointReach::clone() const { return std::make_unique<PointReach>(*this); }

// --- PointPush --------------------------------------------------------------

PointPush::PointPush(Options options)
    : Environment(EnvSpec{"PointPush", 6, unit_box2(), options.max_episode_steps, RewardRegime::Distance}),
      options_(options) {
    if (!(options_.step_size > 0.0) || !(options_.contact_radius > 0.0) || !(options_.success_radius > 0.0) ||
        !(options_.max_distance > 0.0)) {
        throw ConfigError("PointPush: radii, step size and max distance must be positive");
    }
}

std::unique_ptr<PointPush> PointPush::from_options(const EnvOptions& options) {
    reject_unknown_options(options,
                           {"step_size", "contact_radius", "success_radius", "max_distance", "max_episode_steps"},
                           "PointPush");
    Options o;
    o.step_size = option_or(options, "step_size", o.step_size);
    o.contact_radius = option_or(options, "contact_radius", o.contact_radius);
    o.success_radius = option_or(options, "success_radius", o.success_radius);
    o.max_distance = option_or(options, "max_distance", o.max_distance);
    o.max_episode_steps = static_cast<std::size_t>(
        option_or(options, "max_episode_steps", static_cast<double>(o.max_episode_steps)));
    return std::make_unique<PointPush>(o);
}

double PointPush::distance_reward(const Vec2& cube, const Vec2& target) const {
    return 1.0 - std::clamp(norm(sub(cube, target)) / options_.max_distance, 0.0, 1.0);
}

std::vector<double> PointPush::observe() const {
    return {agent_[0], agent_[1], cube_[0], cube_[1], target_[0], target_[1]};
}

std::vector<double> PointPush::on_reset(std::mt19937_64& rng) {
    cube_ = uniform_point(rng, 0.5);
    do {
        target_ = uniform_point(rng, 0.5);
    } while (norm(sub(target_, cube_)) < 0.2);
    do {
        agent_ = uniform_point(rng, 0.8);
    } while (norm(sub(agent_, cube_)) < options_.contact_radius + 0.1);
    return observe();
}

Environment::Outcome PointPush::on_step(const Action& action) {
    const auto& a = std::get<std::vector<double>>(action);
    const Vec2 motion = scale({a[0], a[1]}, options_.step_size);
    agent_ = clip_arena(add(agent_, motion));
    Vec2 gap = sub(cube_, agent_);
    double gap_len = norm(gap);
    if (gap_len < options_.contact_radius) {
        if (gap_len < 1e-12) {
            gap = norm(motion) > 0.0 ? motion : Vec2{1.0, 0.0};
            gap_len = norm(gap);
        }
        const Vec2 dir = scale(gap, 1.0 / gap_len);
        cube_ = clip_arena(add(agent_, scale(dir, options_.contact_radius)));
        // A cube pinned against a wall blocks the agent instead.
        if (norm(sub(cube_, agent_)) < options_.contact_radius) {
            agent_ = clip_arena(sub(cube_, scale(dir, options_.contact_radius)));
        }
    }
    const bool reached = norm(sub(cube_, target_)) < options_.success_radius;
    return {observe(), distance_reward(cube_, target_), reached};
}

Action PointPush::oracle_action(std::span<const double> state) const {
    const Vec2 p{state[0], state[1]};
    const Vec2 c{state[2], state[3]};
    const Vec2 t{state[4], state[5]};
    const double step = options_.step_size;
    const double contact = options_.contact_radius;

    const Vec2 to_target = sub(t, c);
    const double dist = norm(to_target);
    if (dist < 1e-9) return std::vector<double>{0.0, 0.0};
    const Vec2 u = scale(to_target, 1.0 / dist);

    const Vec2 rel = sub(p, c);
    const double along = dot(rel, u);
    const double lateral = std::abs(rel[0] * u[1] - rel[1] * u[0]);

    // Behind the cube and lined up: push so the cube lands at most one step
    // (and never past the target) further along the cube-target line.
    if (along < 0.0 && lateral < 0.3 * contact && -along < contact + 1.5 * step) {
        const double advance = std::min(dist, 0.9 * step);
        const Vec2 goal = add(c, scale(u, advance - contact));
        return steer(p, goal, step);
    }

    // Otherwise orbit the cube at a safe radius until behind it.
    const double orbit = contact + 0.06;
    const double pi = std::numbers::pi;
    const double theta_p = std::atan2(rel[1], rel[0]);
    const double theta_b = std::atan2(-u[1], -u[0]);
    double delta = theta_b - theta_p;
    while (delta > pi) delta -= 2.0 * pi;
    while (delta <= -pi) delta += 2.0 * pi;
    const double advance = std::clamp(delta, -pi / 4.0, pi / 4.0);
    const double theta = theta_p + advance;
    const Vec2 waypoint = add(c, {orbit * std::cos(theta), orbit * std::sin(theta)});
    return steer(p, waypoint, step);
}

std::string PointPush::render_state(std::span<const double> state) const {
    std::ostringstream out;
    out << "state: " << format_vector(state) << '\n';
    out << "agent_position: " << render_point({state[0], state[1]}) << '\n';
    out << "cube_position: " << render_point({state[2], state[3]}) << '\n';
    out << "target_position: " << render_point({state[4], state[5]});
    return out.str();
}

std::string PointPush::task_description() const {
    return "Push the cube to the target position inside the square [-1, 1] x [-1, 1]. The point agent moves "
           "with 2-D velocity commands in [-1, 1] per axis and pushes the cube by moving into it. The reward "
           "grows as the cube gets closer to the target.";
}

std::unique_ptr<Environment> PointPush::clone() const { return std::make_unique<PointPush>(*this); }

}  // namespace varl::envs
