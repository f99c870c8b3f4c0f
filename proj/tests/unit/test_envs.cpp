#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "support/tabular.hpp"
#include "varl/envs/chain_mdp.hpp"
#include "varl/envs/grid_world.hpp"
#include "varl/envs/point_envs.hpp"
#include "varl/envs/registry.hpp"
#include "varl/envs/tiny_mdp.hpp"
#include "varl/errors.hpp"

using namespace varl;
using namespace varl::envs;

namespace {

SparseGridWorld fixed_grid(int size, int gx, int gy, bool onehot = false) {
    SparseGridWorld::Options o;
    o.size = size;
    o.max_episode_steps = 4 * static_cast<std::size_t>(size);
    o.goal = GridCell{gx, gy};
    o.onehot = onehot;
    return SparseGridWorld(o, 0);
}

bool contains_action(const std::vector<std::size_t>& set, std::size_t a) {
    return std::find(set.begin(), set.end(), a) != set.end();
}

}  // namespace

TEST_CASE("action spaces") {
    const ActionSpace d = DiscreteSpace{3, {}};
    CHECK(contains(d, Action{std::size_t{2}}));
    CHECK_FALSE(contains(d, Action{std::size_t{3}}));
    CHECK_FALSE(contains(d, Action{std::vector<double>{0.0}}));
    CHECK_THROWS_AS(require_contains(d, Action{std::size_t{5}}), ValidationError);

    const BoxSpace box{{-1.0, 0.0}, {1.0, 4.0}};
    const ActionSpace b = box;
    CHECK(contains(b, Action{std::vector<double>{1.0, 0.0}}));
    CHECK_FALSE(contains(b, Action{std::vector<double>{1.0 + 1e-9, 0.0}}));
    CHECK_FALSE(contains(b, Action{std::vector<double>{0.0}}));
    CHECK_FALSE(contains(b, Action{std::vector<double>{NAN, 1.0}}));

    const auto unit = to_unit(box, std::vector<double>{0.5, 1.0});
    CHECK(unit[0] == doctest::Approx(0.5));
    CHECK(unit[1] == doctest::Approx(-0.5));
    const auto back = from_unit(box, unit);
    CHECK(back[0] == doctest::Approx(0.5));
    CHECK(back[1] == doctest::Approx(1.0));

    CHECK_THROWS_AS(validate_space(DiscreteSpace{1, {}}), ValidationError);
    CHECK_THROWS_AS(validate_space(BoxSpace{{0.0}, {0.0}}), ValidationError);

    CHECK(format_action(Action{std::size_t{2}}) == "2");
    CHECK(format_action(Action{std::vector<double>{0.25, -1.0}}) == "[0.250000, -1.000000]");
    CHECK(format_vector(std::vector<double>{-0.0}) == "[0.000000]");

    std::mt19937_64 rng(4);
    for (int i = 0; i < 200; ++i) {
        CHECK(contains(d, sample_uniform(d, rng)));
        CHECK(contains(b, sample_uniform(b, rng)));
    }
}

TEST_CASE("grid moves and walls") {
    CHECK(SparseGridWorld::move({2, 2}, 0, 5) == GridCell{2, 3});
    CHECK(SparseGridWorld::move({2, 2}, 1, 5) == GridCell{2, 1});
    CHECK(SparseGridWorld::move({2, 2}, 2, 5) == GridCell{3, 2});
    CHECK(SparseGridWorld::move({2, 2}, 3, 5) == GridCell{1, 2});
    CHECK(SparseGridWorld::move({0, 0}, 1, 5) == GridCell{0, 0});
    CHECK(SparseGridWorld::move({0, 0}, 3, 5) == GridCell{0, 0});
    CHECK(SparseGridWorld::move({4, 4}, 0, 5) == GridCell{4, 4});
    CHECK(SparseGridWorld::move({4, 4}, 2, 5) == GridCell{4, 4});
}

TEST_CASE("grid dynamics agree with the independent tabular model") {
    const int size = 5;
    auto env = fixed_grid(size, 3, 4);
    const auto model = testing::grid_model(size, 3, 4);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            for (std::size_t a = 0; a < 4; ++a) {
                const GridCell next = SparseGridWorld::move({x, y}, a, size);
                const std::size_t s = static_cast<std::size_t>(x + size * y);
                CHECK(model.next[s][a] == static_cast<std::size_t>(next.x + size * next.y));
            }
        }
    }
}

TEST_CASE("grid episode: reward, termination, truncation") {
    auto env = fixed_grid(4, 3, 0);
    CHECK_THROWS_AS(env.step(Action{std::size_t{0}}), Error);
    auto s = env.reset(1);
    CHECK(s == std::vector<double>{0.0, 0.0, 1.0, 0.0});
    CHECK_THROWS_AS(env.step(Action{std::size_t{4}}), ValidationError);
    CHECK(env.step(Action{std::size_t{2}}).reward == 0.0);
    CHECK(env.step(Action{std::size_t{2}}).reward == 0.0);
    const auto last = env.step(Action{std::size_t{2}});
    CHECK(last.reward == 1.0);
    CHECK(last.done);
    CHECK(last.success);
    CHECK(last.terminal());
    CHECK_THROWS_AS(env.step(Action{std::size_t{0}}), Error);

    env.reset(2);
    StepResult r;
    for (std::size_t t = 0; t < 16; ++t) {
        REQUIRE_FALSE(env.episode_done());
        r = env.step(Action{std::size_t{3}});
        CHECK(r.reward == 0.0);
    }
    CHECK(r.done);
    CHECK(r.truncated);
    CHECK_FALSE(r.terminal());
    CHECK(env.elapsed_steps() == 16);
}

TEST_CASE("grid defaults and goal draws") {
    auto env = SparseGridWorld::from_options({}, 0);
    CHECK(env->size() == 7);
    CHECK(env->spec().max_episode_steps == 28);
    CHECK(env->spec().state_dim == 4);
    std::set<std::pair<int, int>> goals;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto g = SparseGridWorld::from_options({}, seed)->goal();
        CHECK(g.x + g.y >= 6);
        CHECK(g.x < 7);
        CHECK(g.y < 7);
        goals.insert({g.x, g.y});
    }
    CHECK(goals.size() > 10);
    // Same instance seed, same goal, regardless of episode seeds.
    auto a = SparseGridWorld::from_options({}, 42);
    auto b = SparseGridWorld::from_options({}, 42);
    a->reset(1);
    b->reset(999);
    CHECK(a->goal() == b->goal());

    auto per_episode = SparseGridWorld::from_options({{"goal_per_episode", 1}}, 0);
    std::set<std::pair<int, int>> drawn;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        per_episode->reset(seed);
        drawn.insert({per_episode->goal().x, per_episode->goal().y});
    }
    CHECK(drawn.size() > 1);

    CHECK_THROWS_AS(SparseGridWorld::from_options({{"colour", 1}}, 0), ConfigError);
    CHECK_THROWS_AS(SparseGridWorld::from_options({{"goal_x", 0}, {"goal_y", 0}}, 0), ConfigError);
}

TEST_CASE("grid one-hot observation") {
    auto env = fixed_grid(3, 2, 2, true);
    CHECK(env.spec().state_dim == 13);
    auto s = env.reset(0);
    CHECK(s[4] == 1.0);
    env.step(Action{std::size_t{0}});  // to (0, 1)
    const auto s2 = env.step(Action{std::size_t{2}}).next_state;  // to (1, 1)
    CHECK(std::count(s2.begin() + 4, s2.end(), 1.0) == 1);
    CHECK(s2[4 + 1 * 3 + 1] == 1.0);
    CHECK(env.decode_agent(s2) == GridCell{1, 1});
}

TEST_CASE("grid oracle picks an optimal action in every cell for every goal") {
    const int size = 7;
    for (int gy = 0; gy < size; ++gy) {
        for (int gx = 0; gx < size; ++gx) {
            if (gx == 0 && gy == 0) continue;
            auto env = fixed_grid(size, gx, gy);
            const auto q = testing::optimal_q(testing::grid_model(size, gx, gy), 0.99);
            const auto best = testing::greedy_sets(q);
            for (int y = 0; y < size; ++y) {
                for (int x = 0; x < size; ++x) {
                    if (x == gx && y == gy) continue;
                    const auto a = std::get<std::size_t>(env.oracle_action(env.observe({x, y})));
                    CHECK(contains_action(best[static_cast<std::size_t>(x + size * y)], a));
                }
            }
        }
    }
}

TEST_CASE("grid oracle solves episodes in the Manhattan distance") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto env = SparseGridWorld::from_options({}, seed);
        auto s = env->reset(seed);
        const int manhattan = env->goal().x + env->goal().y;
        int steps = 0;
        StepResult r;
        do {
            r = env->step(env->oracle_action(s));
            s = r.next_state;
            ++steps;
        } while (!r.done);
        CHECK(r.success);
        CHECK(steps == manhattan);
    }
}

TEST_CASE("grid rendering") {
    auto env = fixed_grid(7, 6, 3);
    const auto text = env.render_state(env.observe({2, 1}));
    CHECK(text.find("state: [0.333333, 0.166667, 1.000000, 0.500000]") != std::string::npos);
    CHECK(text.find("agent_position: (2, 1)") != std::string::npos);
    CHECK(text.find("goal_position: (6, 3)") != std::string::npos);
    CHECK(text.find("grid_size: 7x7") != std::string::npos);
    CHECK_FALSE(env.task_description().empty());
}

TEST_CASE("chain dynamics, reward and oracle") {
    ChainMDP env({});
    CHECK(env.length() == 25);
    CHECK(env.spec().max_episode_steps == 50);
    auto s = env.reset(0);
    CHECK(s == std::vector<double>{0.0});
    for (int i = 0; i < 5; ++i) s = env.step(Action{std::size_t{1}}).next_state;
    CHECK(env.position() == 5);
    CHECK(env.decode(s) == 5);
    auto r = env.step(Action{std::size_t{0}});
    CHECK(env.position() == 0);
    CHECK(r.reward == 0.0);

    env.reset(0);
    for (std::size_t i = 0; i + 1 < 24; ++i) CHECK(env.step(env.oracle_action(s)).reward == 0.0);
    r = env.step(Action{std::size_t{1}});
    CHECK(r.reward == 1.0);
    CHECK(r.terminal());

    const auto q = testing::optimal_q(testing::chain_model(25), 0.99);
    const auto best = testing::greedy_sets(q);
    for (std::size_t i = 0; i + 1 < 25; ++i) {
        CHECK(contains_action(best[i], std::get<std::size_t>(env.oracle_action(env.observe(i)))));
    }

    env.reset(0);
    for (int t = 0; t < 50; ++t) r = env.step(Action{std::size_t{0}});
    CHECK(r.truncated);

    auto onehot = ChainMDP::from_options({{"onehot", 1}, {"length", 6}});
    CHECK(onehot->spec().state_dim == 7);
    CHECK(onehot->spec().max_episode_steps == 12);
    CHECK_THROWS_AS(ChainMDP::from_options({{"length", 1}}), ConfigError);
}

TEST_CASE("tiny MDP matches its table and its oracle is optimal") {
    TinyMDP env;
    const auto model = testing::tiny_model();
    for (std::size_t s = 0; s < 2; ++s) {
        for (std::size_t a = 0; a < 2; ++a) {
            CHECK(TinyMDP::kNext[s][a] == model.next[s][a]);
            CHECK(TinyMDP::kReward[s][a] == model.reward[s][a]);
        }
    }
    const auto best = testing::greedy_sets(testing::optimal_q(model, 0.9));
    for (std::size_t s = 0; s < 2; ++s) {
        CHECK(contains_action(best[s], std::get<std::size_t>(env.oracle_action(TinyMDP::observe(s)))));
    }
    auto obs = env.reset(0);
    CHECK(obs == std::vector<double>{1.0, 0.0});
    auto r = env.step(Action{std::size_t{1}});
    CHECK(r.next_state == std::vector<double>{0.0, 1.0});
    CHECK(r.reward == 0.0);
    r = env.step(Action{std::size_t{0}});
    CHECK(r.reward == 1.0);
    CHECK_FALSE(r.done);
}

TEST_CASE("point reach: bounds, reward and oracle") {
    PointReach env({});
    CHECK(env.spec().state_dim == 4);
    CHECK(env.spec().reward_regime == RewardRegime::SparseEvent);
    auto s = env.reset(3);
    CHECK(std::hypot(s[0] - s[2], s[1] - s[3]) >= 0.3);
    CHECK_THROWS_AS(env.step(Action{std::vector<double>{1.5, 0.0}}), ValidationError);
    CHECK_THROWS_AS(env.step(Action{std::size_t{0}}), ValidationError);

    // A full-speed move along +x advances by the step size.
    const auto r = env.step(Action{std::vector<double>{1.0, 0.0}});
    CHECK(r.next_state[0] == doctest::Approx(std::min(s[0] + 0.1, 1.0)));
    CHECK(r.next_state[1] == doctest::Approx(s[1]));

    int solved = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        s = env.reset(seed);
        StepResult step;
        do {
            step = env.step(env.oracle_action(s));
            CHECK((step.reward == 0.0 || step.reward == 1.0));
            s = step.next_state;
        } while (!step.done);
        solved += step.success ? 1 : 0;
    }
    CHECK(solved == 100);

    // Random play never leaves the arena.
    std::mt19937_64 rng(8);
    s = env.reset(77);
    for (int t = 0; t < 50; ++t) {
        const auto step = env.step(sample_uniform(env.spec().action_space, rng));
        for (double v : step.next_state) CHECK(std::abs(v) <= 1.0);
        if (step.done) break;
    }
}

TEST_CASE("point push: contact mechanics and distance reward") {
    PointPush env({});
    CHECK(env.spec().state_dim == 6);
    CHECK(env.spec().reward_regime == RewardRegime::Distance);
    CHECK(env.distance_reward({0.0, 0.0}, {0.0, 0.0}) == 1.0);
    CHECK(env.distance_reward({0.0, 0.0}, {0.5, 0.0}) == doctest::Approx(0.5));
    CHECK(env.distance_reward({-1.0, 0.0}, {1.0, 0.0}) == 0.0);

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = env.reset(seed);
        CHECK(std::hypot(s[2] - s[4], s[3] - s[5]) >= 0.2);
        CHECK(std::hypot(s[0] - s[2], s[1] - s[3]) >= 0.2);
        for (std::size_t i = 2; i < 6; ++i) CHECK(std::abs(s[i]) <= 0.5);
    }

    // Walking straight into the cube pushes it and keeps the contact gap.
    auto s = env.reset(5);
    std::vector<double> toward{s[2] - s[0], s[3] - s[1]};
    const double len = std::hypot(toward[0], toward[1]);
    toward = {toward[0] / len, toward[1] / len};
    bool moved = false;
    for (int t = 0; t < 40; ++t) {
        const auto step = env.step(Action{toward});
        const auto& n = step.next_state;
        CHECK(step.reward >= 0.0);
        CHECK(step.reward <= 1.0);
        const double gap = std::hypot(n[2] - n[0], n[3] - n[1]);
        CHECK(gap >= 0.1 - 1e-9);
        if (n[2] != s[2] || n[3] != s[3]) moved = true;
        if (step.done) break;
    }
    CHECK(moved);
}

TEST_CASE("point push oracle solves most episodes") {
    PointPush env({});
    int solved = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto s = env.reset(seed);
        StepResult step;
        do {
            step = env.step(env.oracle_action(s));
            s = step.next_state;
        } while (!step.done);
        solved += step.success ? 1 : 0;
    }
    MESSAGE("oracle push success: " << solved << "/100");
    CHECK(solved >= 95);
}

TEST_CASE("registry and cloning") {
    for (const auto& name : env_names()) {
        auto env = make_env(name);
        CHECK(env->spec().name == name);
        auto s = env->reset(11);
        auto copy = env->clone();
        const auto a = env->oracle_action(s);
        const auto r1 = env->step(a);
        const auto r2 = copy->step(a);
        CHECK(r1.next_state == r2.next_state);
        CHECK(r1.reward == r2.reward);
        CHECK(env->render_state(s).rfind("state: [", 0) == 0);
    }
    CHECK_THROWS_AS(make_env("Atari"), ConfigError);
    CHECK_THROWS_AS(make_env("ChainMDP", {{"size", 3}}), ConfigError);
}

TEST_CASE("episodes are reproducible from the reset seed") {
    for (const auto& name : env_names()) {
        auto a = make_env(name, {}, 3);
        auto b = make_env(name, {}, 3);
        CHECK(a->reset(17) == b->reset(17));
    }
}
