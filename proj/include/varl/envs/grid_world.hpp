#pragma once

#include <cstdint>
#include <optional>

#include "varl/envs/environment.hpp"

namespace varl::envs {

struct GridCell {
    int x = 0;
    int y = 0;

    bool operator==(const GridCell&) const = default;
};

/// Square grid with a single goal cell and an event reward: 1 on entering
/// the goal, 0 otherwise. The agent starts in the corner (0, 0).
///
/// Actions: 0 north (y+1), 1 south (y-1), 2 east (x+1), 3 west (x-1); moves
/// into a wall leave the agent in place.
///
/// Observation: [ax, ay, gx, gy] scaled to [0, 1] by (size - 1), optionally
/// followed by a one-hot encoding of the agent cell.
class SparseGridWorld final : public Environment {
public:
    struct Options {
        int size = 7;
        std::size_t max_episode_steps = 28;
        // The goal is drawn once per instance unless this is set, in which
        // case every reset draws a new one.
        bool goal_per_episode = false;
        bool onehot = false;
        std::optional<GridCell> goal;
    };

    SparseGridWorld(Options options, std::uint64_t instance_seed);
    static std::unique_ptr<SparseGridWorld> from_options(const EnvOptions& options, std::uint64_t instance_seed);

    int size() const { return options_.size; }
    GridCell start() const { return {0, 0}; }
    GridCell goal() const { return goal_; }
    GridCell agent() const { return agent_; }
    const Options& options() const { return options_; }

    /// Observation vector for the agent standing on `cell` with goal `goal`.
    std::vector<double> observe(GridCell cell, GridCell goal) const;
    std::vector<double> observe(GridCell cell) const { return observe(cell, goal_); }

    GridCell decode_agent(std::span<const double> state) const;
    GridCell decode_goal(std::span<const double> state) const;

    static GridCell move(GridCell from, std::size_t action, int size);

    Action oracle_action(std::span<const double> state) const override;
    std::string render_state(std::span<const double> state) const override;
    std::string task_description() const override;
    std::unique_ptr<Environment> clone() const override;

protected:
    std::vector<double> on_reset(std::mt19937_64& rng) override;
    Outcome on_step(const Action& action) override;

private:
    GridCell sample_goal(std::mt19937_64& rng) const;

    Options options_;
    GridCell goal_;
    GridCell agent_;
};

}  // namespace varl::envs
