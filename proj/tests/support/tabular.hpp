#pragma once

// Independent tabular models of the discrete environments, written from the
// task definitions rather than from the environment classes, plus exact
// dynamic programming over them.

#include <cstddef>
#include <vector>

namespace varl::testing {

struct TabularMdp {
    std::size_t states = 0;
    std::size_t actions = 0;
    std::vector<std::vector<std::size_t>> next;   // [s][a]
    std::vector<std::vector<double>> reward;      // [s][a]
    std::vector<std::vector<bool>> ends;          // [s][a]: the transition terminates
};

/// Grid of side `size`, cells indexed x + size * y, actions N/S/E/W.
TabularMdp grid_model(int size, int goal_x, int goal_y);

/// Chain of `length` states, action 0 back to the start, action 1 forward.
TabularMdp chain_model(std::size_t length);

/// The two-state continuing test MDP.
TabularMdp tiny_model();

/// Optimal Q by value iteration (max backup) to `tol` in sup norm.
std::vector<std::vector<double>> optimal_q(const TabularMdp& mdp, double gamma, double tol = 1e-12);

/// Soft-optimal Q with temperature alpha: V(s) = alpha log sum_a exp(Q(s,a)/alpha).
std::vector<std::vector<double>> soft_q(const TabularMdp& mdp, double gamma, double alpha, double tol = 1e-12);

/// Actions within `tol` of the maximum in each row.
std::vector<std::vector<std::size_t>> greedy_sets(const std::vector<std::vector<double>>& q, double tol = 1e-9);

}  // namespace varl::testing
