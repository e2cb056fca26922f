#pragma once

#include "ada/grid.hpp"

#include <cstdint>
#include <vector>

namespace ada {

/// Finite MDP with dense transition tensor. transition[(s*A + a)*S + s']
/// is P(s'|s,a); reward[s*A + a] is R(s,a).
struct TabularMDP {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> transition; // S*A*S
    std::vector<double> reward;     // S*A
    double gamma = 0.0;

    const double* row(int s, int a) const {
        return transition.data() + (static_cast<std::size_t>(s) * n_actions + a) * n_states;
    }
    double r(int s, int a) const { return reward[static_cast<std::size_t>(s) * n_actions + a]; }
};

struct SolveResult {
    std::vector<double> q_star; // S*A
    std::vector<double> v_star; // S
    int iterations = 0;
    double residual = 0.0;

    double q(int s, int a, int n_actions) const {
        return q_star[static_cast<std::size_t>(s) * n_actions + a];
    }
};

struct StochasticPolicy {
    std::vector<double> probs; // S*A, rows sum to 1
};

struct ConfidenceTable {
    std::vector<double> values; // S*A in [0,1]
};

/// Uniformly random dense MDP: rows are normalized positive uniform draws.
TabularMDP random_mdp(std::uint64_t seed, int n_states, int n_actions, double gamma);

void validate_mdp(const TabularMDP& mdp);
void validate_policy(const TabularMDP& mdp, const StochasticPolicy& policy);

/// One in-place Bellman optimality sweep; returns the sup-norm change.
double bellman_sweep(const TabularMDP& mdp, std::vector<double>& q);

/// Iterates Bellman sweeps until the sup-norm residual drops to tol.
SolveResult value_iteration(const TabularMDP& mdp, double tol = 1e-10,
                            int max_sweeps = 100000);

/// Iterative evaluation of a stochastic policy; the returned v satisfies the
/// policy Bellman equation with sup-norm residual at most tol.
std::vector<double> policy_evaluation(const TabularMDP& mdp, const StochasticPolicy& policy,
                                      double tol = 1e-10, int max_sweeps = 100000);

/// Q^pi derived from an evaluated v: R(s,a) + gamma * sum_s' P v.
std::vector<double> policy_q(const TabularMDP& mdp, const std::vector<double>& v);

/// Lowest-index action maximizing q row `s`.
int greedy_action(const std::vector<double>& q, int s, int n_actions);

/// (1-gamma) * min_s [best Q* minus best non-argmax Q*]. Throws
/// degenerate_gap_error when some state's top two actions tie within tie_tol.
double assumption1_bound(const TabularMDP& mdp, const SolveResult& solve,
                         double tie_tol = 1e-9);

struct Theorem1Result {
    bool holds = false;
    std::vector<int> violating_states;
    double min_margin = 0.0;     // min_s (Q1[s, a*_orig] - max_a Q1[s, a])
    double sandwich_slack = 0.0; // worst elementwise violation of the Q1 bounds
};

/// Solves the bonus-shaped MDP and checks that every original optimal action
/// stays within tie_tol of the shaped optimum, together with the elementwise
/// bound Q* <= Q1* <= Q* + C/(1-gamma) (within tol).
Theorem1Result check_theorem1(const TabularMDP& mdp, const std::vector<double>& bonus,
                              double tol = 1e-8, double tie_tol = 1e-9);

struct Theorem2Result {
    bool holds = false;
    double min_gap = 0.0; // min_s (V^{pi_new}(s) - V^pi(s))
};

/// Builds pi_new with the per-state confidence switch (greedy at a* when
/// conf[s, a*] >= kappa, else pi) and checks V^{pi_new} >= V^pi - tol.
Theorem2Result check_theorem2(const TabularMDP& mdp, const StochasticPolicy& pi,
                              const ConfidenceTable& conf, double kappa,
                              double tol = 1e-9);

/// Exact tabular encoding of a gridworld: one state per cell, terminal and
/// wall cells absorbing with zero reward.
TabularMDP gridworld_to_mdp(const GridSpec& spec, double gamma);

} // namespace ada
