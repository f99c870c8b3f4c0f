#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "doctest.h"
#include "varl/buffers/buffers.hpp"
#include "varl/errors.hpp"

using namespace varl;
using namespace varl::buffers;

namespace {

Transition make(double tag, std::size_t action = 0) {
    return Transition{{tag}, envs::Action{action}, 0.5, {tag + 1.0}, false, false};
}

const envs::ActionSpace kDiscrete = envs::DiscreteSpace{3, {}};
const envs::ActionSpace kBox = envs::BoxSpace{{-2.0, -1.0}, {2.0, 1.0}};

}  // namespace

TEST_CASE("replay ring keeps the newest items in order") {
    ReplayBuffer buf(4, kDiscrete);
    CHECK(buf.empty());
    for (int i = 0; i < 6; ++i) buf.push(make(i));
    CHECK(buf.size() == 4);
    const auto items = buf.items();
    REQUIRE(items.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(items[static_cast<std::size_t>(i)].state[0] == i + 2);
    const auto recent = buf.recent(3);
    REQUIRE(recent.size() == 3);
    CHECK(recent[0].state[0] == 5);
    CHECK(recent[1].state[0] == 4);
    CHECK(recent[2].state[0] == 3);
    CHECK(buf.recent(10).size() == 4);
    CHECK(buf.recent(0).empty());
}

TEST_CASE("recent before the ring wraps") {
    ReplayBuffer buf(10, kDiscrete);
    for (int i = 0; i < 3; ++i) buf.push(make(i));
    const auto recent = buf.recent(5);
    REQUIRE(recent.size() == 3);
    CHECK(recent[0].state[0] == 2);
    CHECK(recent[2].state[0] == 0);
}

TEST_CASE("replay validation") {
    ReplayBuffer buf(4, kDiscrete);
    CHECK_THROWS_AS(buf.push(make(0, 3)), ValidationError);
    auto bad = make(0);
    bad.reward = NAN;
    CHECK_THROWS_AS(buf.push(bad), ValidationError);
    bad = make(0);
    bad.next_state[0] = INFINITY;
    CHECK_THROWS_AS(buf.push(bad), ValidationError);
    CHECK_THROWS_AS(ReplayBuffer(0, kDiscrete), ConfigError);
    std::mt19937_64 rng(0);
    CHECK_THROWS(buf.sample_uniform(2, rng));
}

TEST_CASE("uniform sampling covers the buffer evenly") {
    ReplayBuffer buf(5, kDiscrete);
    for (int i = 0; i < 5; ++i) buf.push(make(i));
    std::mt19937_64 rng(1);
    std::map<double, int> counts;
    const int draws = 50000;
    for (const auto& t : buf.sample_uniform(draws, rng)) counts[t.state[0]]++;
    REQUIRE(counts.size() == 5);
    for (const auto& [k, c] : counts) CHECK(std::abs(c - draws / 5) < 600);
}

TEST_CASE("sampling is reproducible and independent of the buffer") {
    ReplayBuffer buf(8, kDiscrete);
    for (int i = 0; i < 8; ++i) buf.push(make(i));
    std::mt19937_64 a(3), b(3);
    CHECK(buf.sample_uniform(16, a) == buf.sample_uniform(16, b));
    auto copy = buf.sample_uniform(1, a);
    copy[0].state[0] = -100.0;
    for (const auto& t : buf.items()) CHECK(t.state[0] >= 0.0);
}

TEST_CASE("dump writes one JSON object per transition") {
    ReplayBuffer buf(3, kDiscrete);
    buf.push(make(1, 2));
    buf.push(make(2, 1));
    std::ostringstream out;
    buf.dump(out);
    const std::string text = out.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(text.find("\"a\":2") != std::string::npos);
}

TEST_CASE("guidance buffer keeps duplicates and validates actions") {
    GuidanceBuffer g(kDiscrete);
    g.push({0.1}, envs::Action{std::size_t{1}});
    g.push({0.1}, envs::Action{std::size_t{1}});
    CHECK(g.size() == 2);
    CHECK_THROWS_AS(g.push({0.1}, envs::Action{std::size_t{7}}), ValidationError);
    CHECK_THROWS_AS(g.push({NAN}, envs::Action{std::size_t{0}}), ValidationError);
    CHECK(g.size() == 2);
    std::mt19937_64 rng(0);
    CHECK(g.sample(5, rng).size() == 5);
    GuidanceBuffer empty(kDiscrete);
    CHECK(empty.sample(5, rng).empty());
}

TEST_CASE("guidance buffer stores pre-squash actions for boxes") {
    GuidanceBuffer g(kBox);
    g.push({0.0}, envs::Action{std::vector<double>{1.0, 0.0}});
    REQUIRE(g.pairs()[0].presquash.size() == 2);
    CHECK(g.pairs()[0].presquash[0] == doctest::Approx(std::atanh(0.5)));
    CHECK(g.pairs()[0].presquash[1] == 0.0);
    CHECK(g.clamped_count() == 0);
    g.push({0.0}, envs::Action{std::vector<double>{2.0, -1.0}});
    CHECK(g.clamped_count() == 2);
    CHECK(std::isfinite(g.pairs()[1].presquash[0]));
    CHECK(g.pairs()[1].presquash[1] == doctest::Approx(std::atanh(-kSquashClamp)));
    CHECK_THROWS_AS(g.push({0.0}, envs::Action{std::vector<double>{2.5, 0.0}}), ValidationError);
}

TEST_CASE("bounded guidance buffer evicts the oldest pair") {
    GuidanceBuffer g(kDiscrete, 2);
    g.push({0.0}, envs::Action{std::size_t{0}});
    g.push({1.0}, envs::Action{std::size_t{1}});
    g.push({2.0}, envs::Action{std::size_t{2}});
    CHECK(g.size() == 2);
    std::vector<double> states;
    for (const auto& p : g.pairs()) states.push_back(p.state[0]);
    std::sort(states.begin(), states.end());
    CHECK(states == std::vector<double>{1.0, 2.0});
}
