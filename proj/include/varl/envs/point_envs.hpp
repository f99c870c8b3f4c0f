#pragma once

#include <array>

#include "varl/envs/environment.hpp"

namespace varl::envs {

using Vec2 = std::array<double, 2>;

/// Planar point agent in [-1, 1]^2 that must reach a target. Actions are
/// velocity commands in [-1, 1]^2 scaled by `step_size`. Event reward: 1 when
/// the agent comes within `success_radius` of the target, 0 otherwise.
///
/// Observation: [px, py, tx, ty].
class PointReach final : public Environment {
public:
    struct Options {
        double step_size = 0.1;
        double success_radius = 0.1;
        std::size_t max_episode_steps = 50;
    };

    explicit PointReach(Options options);
    static std::unique_ptr<PointReach> from_options(const EnvOptions& options);

    const Options& options() const { return options_; }

    Action oracle_action(std::span<const double> state) const override;
    std::string render_state(std::span<const double> state) const override;
    std::string task_description() const override;
    std::unique_ptr<Environment> clone() const override;

protected:
    std::vector<double> on_reset(std::mt19937_64& rng) override;
    Outcome on_step(const Action& action) override;

private:
    std::vector<double> observe() const;

    Options options_;
    Vec2 agent_{};
    Vec2 target_{};
};

/// Planar pushing: a point agent pushes a disc-shaped cube toward a target.
/// When the agent ends a move closer than `contact_radius` to the cube, the
/// cube is displaced along the agent-to-cube direction until the gap equals
/// `contact_radius`. Distance reward every step:
///   r = 1 - clip(|cube - target| / max_distance, 0, 1).
/// The episode succeeds when the cube is within `success_radius` of the target.
///
/// Observation: [px, py, cx, cy, tx, ty].
class PointPush final : public Environment {
public:
    struct Options {
        double step_size = 0.05;
        double contact_radius = 0.1;
        double success_radius = 0.05;
        double max_distance = 1.0;
        std::size_t max_episode_steps = 200;
    };

    explicit PointPush(Options options);
    static std::unique_ptr<PointPush> from_options(const EnvOptions& options);

    const Options& options() const { return options_; }

    /// Distance reward for a given cube/target configuration.
    double distance_reward(const Vec2& cube, const Vec2& target) const;

    Action oracle_action(std::span<const double> state) const override;
    std::string render_state(std::span<const double> state) const override;
    std::string task_description() const override;
    std::unique_ptr<Environment> clone() const override;

protected:
    std::vector<double> on_reset(std::mt19937_64& rng) override;
    Outcome on_step(const Action& action) override;

private:
    std::vector<double> observe() const;

    Options options_;
    Vec2 agent_{};
    Vec2 cube_{};
    Vec2 target_{};
};

}  // namespace varl::envs
