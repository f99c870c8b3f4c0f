#include "varl/envs/grid_world.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "varl/errors.hpp"

namespace varl::envs {
namespace {

EnvSpec grid_spec(const SparseGridWorld::Options& o) {
    if (o.size < 2) throw ConfigError("SparseGridWorld: size must be at least 2");
    const std::size_t cells = static_cast<std::size_t>(o.size) * static_cast<std::size_t>(o.size);
    return EnvSpec{"SparseGridWorld", 4 + (o.onehot ? cells : 0),
                   DiscreteSpace{4, {"north", "south", "east", "west"}}, o.max_episode_steps,
                   RewardRegime::SparseEvent};
}

}  // namespace

SparseGridWorld::SparseGridWorld(Options options, std::uint64_t instance_seed)
    : Environment(grid_spec(options)), options_(std::move(options)) {
    if (options_.goal) {
        const GridCell g = *options_.goal;
        if (g.x < 0 || g.y < 0 || g.x >= size() || g.y >= size()) throw ConfigError("SparseGridWorld: goal outside grid");
        if (g == start()) throw ConfigError("SparseGridWorld: goal may not coincide with the start cell");
        goal_ = g;
    } else {
        std::mt19937_64 rng(instance_seed);
        goal_ = sample_goal(rng);
    }
    agent_ = start();
}

std::unique_ptr<SparseGridWorld> SparseGridWorld::from_options(const EnvOptions& options,
                                                               std::uint64_t instance_seed) {
    reject_unknown_options(options, {"size", "max_episode_steps", "goal_per_episode", "onehot", "goal_x", "goal_y"},
                           "SparseGridWorld");
    Options o;
    o.size = static_cast<int>(option_or(options, "size", o.size));
    o.max_episode_steps = static_cast<std::size_t>(option_or(options, "max_episode_steps",
                                                             static_cast<double>(4 * o.size)));
    o.goal_per_episode = option_or(options, "goal_per_episode", 0.0) != 0.0;
    o.onehot = option_or(options, "onehot", 0.0) != 0.0;
    if (options.count("goal_x") || options.count("goal_y")) {
        o.goal = GridCell{static_cast<int>(option_or(options, "goal_x", o.size - 1)),
                          static_cast<int>(option_or(options, "goal_y", o.size - 1))};
    }
    return std::make_unique<SparseGridWorld>(o, instance_seed);
}

GridCell SparseGridWorld::sample_goal(std::mt19937_64& rng) const {
    // Goals sit at least (size - 1) Manhattan steps from the start so that a
    // random walk rarely stumbles onto them.
    std::vector<GridCell> candidates;
    for (int y = 0; y < size(); ++y) {
        for (int x = 0; x < size(); ++x) {
            if (x + y >= size() - 1) candidates.push_back({x, y});
        }
    }
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    return candidates[pick(rng)];
}

std::vector<double> SparseGridWorld::observe(GridCell cell, GridCell goal) const {
    const double scale = static_cast<double>(size() - 1);
    std::vector<double> s{cell.x / scale, cell.y / scale, goal.x / scale, goal.y / scale};
    if (options_.onehot) {
        s.resize(spec().state_dim, 0.0);
        s[4 + static_cast<std::size_t>(cell.y * size() + cell.x)] = 1.0;
    }
    return s;
}

GridCell SparseGridWorld::decode_agent(std::span<const double> state) const {
    const double scale = static_cast<double>(size() - 1);
    return {static_cast<int>(std::lround(state[0] * scale)), static_cast<int>(std::lround(state[1] * scale))};
}

GridCell SparseGridWorld::decode_goal(std::span<const double> state) const {
    const double scale = static_cast<double>(size() - 1);
    return {static_cast<int>(std::lround(state[2] * scale)), static_cast<int>(std::lround(state[3] * scale))};
}

GridCell SparseGridWorld::move(GridCell from, std::size_t action, int size) {
    GridCell to = from;
    switch (action) {
        case 0: to.y += 1; break;
        case 1: to.y -= 1; break;
        case 2: to.x += 1; break;
        case 3: to.x -= 1; break;
        default: throw ValidationError("SparseGridWorld: action out of range");
    }
    if (to.x < 0 || to.y < 0 || to.x >= size || to.y >= size) return from;
    return to;
}

std::vector<double> SparseGridWorld::on_reset(std::mt19937_64& rng) {
    if (options_.goal_per_episode && !options_.goal) goal_ = sample_goal(rng);
    agent_ = start();
    return observe(agent_);
}

Environment::Outcome SparseGridWorld::on_step(const Action& action) {
    agent_ = move(agent_, std::get<std::size_t>(action), size());
    const bool reached = agent_ == goal_;
    return {observe(agent_), reached ? 1.0 : 0.0, reached};
}

Action SparseGridWorld::oracle_action(std::span<const double> state) const {
    const GridCell a = decode_agent(state);
    const GridCell g = decode_goal(state);
    const int dx = g.x - a.x;
    const int dy = g.y - a.y;
    if (dx == 0 && dy == 0) return std::size_t{0};  // already on the goal; any move is fine
    // Close the larger gap first (horizontal on ties), which traces a
    // staircase along the line to the goal.
    if (std::abs(dx) >= std::abs(dy)) return std::size_t{dx > 0 ? 2u : 3u};
    return std::size_t{dy > 0 ? 0u : 1u};
}

std::string SparseGridWorld::render_state(std::span<const double> state) const {
    const GridCell a = decode_agent(state);
    const GridCell g = decode_goal(state);
    std::ostringstream out;
    out << "state: " << format_vector(state.subspan(0, 4)) << '\n';
    out << "agent_position: (" << a.x << ", " << a.y << ")\n";
    out << "goal_position: (" << g.x << ", " << g.y << ")\n";
    out << "grid_size: " << size() << 'x' << size();
    return out.str();
}

std::string SparseGridWorld::task_description() const {
    return "Navigate a " + std::to_string(size()) + "x" + std::to_string(size()) +
           " grid from the start cell to the goal cell. Coordinates are (x, y) with x growing east and y "
           "growing north. A reward of 1 is given only when the agent enters the goal cell; every other "
           "step gives 0. Moving into a wall leaves the agent in place.";
}

std::unique_ptr<Environment> SparseGridWorld::clone() const { return std::make_unique<SparseGridWorld>(*this); }

}  // namespace varl::envs
