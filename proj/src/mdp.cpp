#include "ada/mdp.hpp"

#include "ada/error.hpp"
#include "ada/kernels.hpp"
#include "ada/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ada {

TabularMDP random_mdp(std::uint64_t seed, int n_states, int n_actions, double gamma) {
    if (n_states < 2 || n_actions < 2)
        throw validation_error("random_mdp needs at least 2 states and 2 actions");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw validation_error("random_mdp needs 0 < gamma < 1");

    TabularMDP mdp;
    mdp.n_states = n_states;
    mdp.n_actions = n_actions;
    mdp.gamma = gamma;
    mdp.transition.resize(static_cast<std::size_t>(n_states) * n_actions * n_states);
    mdp.reward.resize(static_cast<std::size_t>(n_states) * n_actions);

    Rng rng(split_seed(seed, "random_mdp"));
    for (int s = 0; s < n_states; ++s) {
        for (int a = 0; a < n_actions; ++a) {
            double* row = mdp.transition.data() +
                          (static_cast<std::size_t>(s) * n_actions + a) * n_states;
            double total = 0.0;
            for (int t = 0; t < n_states; ++t) {
                row[t] = rng.uniform_pos();
                total += row[t];
            }
            kern::scal(1.0 / total, row, static_cast<std::size_t>(n_states));
            mdp.reward[static_cast<std::size_t>(s) * n_actions + a] = rng.uniform();
        }
    }
    return mdp;
}

void validate_mdp(const TabularMDP& mdp) {
    if (mdp.n_states <= 0 || mdp.n_actions <= 0)
        throw validation_error("MDP dimensions must be positive");
    if (!(mdp.gamma >= 0.0 && mdp.gamma < 1.0))
        throw validation_error("MDP needs 0 <= gamma < 1");
    for (int s = 0; s < mdp.n_states; ++s) {
        for (int a = 0; a < mdp.n_actions; ++a) {
            const double* row = mdp.row(s, a);
            double total = 0.0;
            for (int t = 0; t < mdp.n_states; ++t) {
                if (row[t] < 0.0) throw validation_error("negative transition probability");
                total += row[t];
            }
            if (std::abs(total - 1.0) > 1e-12)
                throw validation_error("transition row does not sum to 1");
        }
    }
}

void validate_policy(const TabularMDP& mdp, const StochasticPolicy& policy) {
    if (policy.probs.size() != static_cast<std::size_t>(mdp.n_states) * mdp.n_actions)
        throw validation_error("policy shape mismatch");
    for (int s = 0; s < mdp.n_states; ++s) {
        double total = 0.0;
        for (int a = 0; a < mdp.n_actions; ++a) {
            double p = policy.probs[static_cast<std::size_t>(s) * mdp.n_actions + a];
            if (p < 0.0) throw validation_error("negative policy probability");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw validation_error("policy row does not sum to 1");
    }
}

double bellman_sweep(const TabularMDP& mdp, std::vector<double>& q) {
    const int S = mdp.n_states;
    const int A = mdp.n_actions;
    std::vector<double> v(static_cast<std::size_t>(S));
    for (int s = 0; s < S; ++s) {
        const double* row = q.data() + static_cast<std::size_t>(s) * A;
        v[s] = *std::max_element(row, row + A);
    }
    double residual = 0.0;
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            double next = mdp.r(s, a) +
                          mdp.gamma * kern::dot(mdp.row(s, a), v.data(), static_cast<std::size_t>(S));
            double& cell = q[static_cast<std::size_t>(s) * A + a];
            residual = std::max(residual, std::abs(next - cell));
            cell = next;
        }
    }
    return residual;
}

SolveResult value_iteration(const TabularMDP& mdp, double tol, int max_sweeps) {
    if (!(tol > 0.0)) throw validation_error("value_iteration: tol must be positive");
    SolveResult out;
    out.q_star.assign(static_cast<std::size_t>(mdp.n_states) * mdp.n_actions, 0.0);
    double residual = 0.0;
    int sweeps = 0;
    for (; sweeps < max_sweeps; ++sweeps) {
        residual = bellman_sweep(mdp, out.q_star);
        if (residual <= tol) {
            ++sweeps;
            break;
        }
    }
    out.iterations = sweeps;
    out.residual = residual;
    out.v_star.resize(static_cast<std::size_t>(mdp.n_states));
    for (int s = 0; s < mdp.n_states; ++s) {
        const double* row = out.q_star.data() + static_cast<std::size_t>(s) * mdp.n_actions;
        out.v_star[s] = *std::max_element(row, row + mdp.n_actions);
    }
    return out;
}

std::vector<double> policy_evaluation(const TabularMDP& mdp, const StochasticPolicy& policy,
                                      double tol, int max_sweeps) {
    validate_policy(mdp, policy);
    const int S = mdp.n_states;
    const int A = mdp.n_actions;
    std::vector<double> v(static_cast<std::size_t>(S), 0.0);
    std::vector<double> next(static_cast<std::size_t>(S));
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double residual = 0.0;
        for (int s = 0; s < S; ++s) {
            double acc = 0.0;
            for (int a = 0; a < A; ++a) {
                double p = policy.probs[static_cast<std::size_t>(s) * A + a];
                if (p == 0.0) continue;
                acc += p * (mdp.r(s, a) +
                            mdp.gamma * kern::dot(mdp.row(s, a), v.data(), static_cast<std::size_t>(S)));
            }
            next[s] = acc;
            residual = std::max(residual, std::abs(acc - v[s]));
        }
        v.swap(next);
        if (residual <= tol) break;
    }
    return v;
}

std::vector<double> policy_q(const TabularMDP& mdp, const std::vector<double>& v) {
    std::vector<double> q(static_cast<std::size_t>(mdp.n_states) * mdp.n_actions);
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a)
            q[static_cast<std::size_t>(s) * mdp.n_actions + a] =
                mdp.r(s, a) +
                mdp.gamma * kern::dot(mdp.row(s, a), v.data(), static_cast<std::size_t>(mdp.n_states));
    return q;
}

int greedy_action(const std::vector<double>& q, int s, int n_actions) {
    const double* row = q.data() + static_cast<std::size_t>(s) * n_actions;
    int best = 0;
    for (int a = 1; a < n_actions; ++a)
        if (row[a] > row[best]) best = a; // ties: lowest index wins
    return best;
}

double assumption1_bound(const TabularMDP& mdp, const SolveResult& solve, double tie_tol) {
    if (mdp.n_actions < 2)
        throw contract_error("assumption1_bound needs at least two actions");
    double min_gap = 0.0;
    bool first = true;
    for (int s = 0; s < mdp.n_states; ++s) {
        const double* row = solve.q_star.data() + static_cast<std::size_t>(s) * mdp.n_actions;
        int best = greedy_action(solve.q_star, s, mdp.n_actions);
        double second = 0.0;
        bool have_second = false;
        for (int a = 0; a < mdp.n_actions; ++a) {
            if (a == best) continue;
            if (!have_second || row[a] > second) {
                second = row[a];
                have_second = true;
            }
        }
        double gap = row[best] - second;
        if (gap <= tie_tol)
            throw degenerate_gap_error("state " + std::to_string(s) +
                                       " has no Q* gap between optimal and suboptimal actions");
        if (first || gap < min_gap) {
            min_gap = gap;
            first = false;
        }
    }
    return (1.0 - mdp.gamma) * min_gap;
}

Theorem1Result check_theorem1(const TabularMDP& mdp, const std::vector<double>& bonus,
                              double tol, double tie_tol) {
    if (bonus.size() != mdp.reward.size())
        throw validation_error("bonus shape mismatch");

    // residual small enough that both fixed points are accurate to ~tol/10
    double vi_tol = 0.1 * tol * (1.0 - mdp.gamma) / std::max(mdp.gamma, 0.5);
    SolveResult base = value_iteration(mdp, vi_tol);
    double c_bound = assumption1_bound(mdp, base, tie_tol);

    for (int s = 0; s < mdp.n_states; ++s) {
        for (int a = 0; a < mdp.n_actions; ++a) {
            double b = bonus[static_cast<std::size_t>(s) * mdp.n_actions + a];
            if (b < 0.0 || b > c_bound)
                throw contract_error("bonus outside [0, C] at state " + std::to_string(s) +
                                     ", action " + std::to_string(a));
        }
    }

    TabularMDP shaped = mdp;
    for (std::size_t i = 0; i < shaped.reward.size(); ++i) shaped.reward[i] += bonus[i];
    SolveResult after = value_iteration(shaped, vi_tol);

    Theorem1Result out;
    out.holds = true;
    double inflate = c_bound / (1.0 - mdp.gamma);
    bool first = true;
    for (int s = 0; s < mdp.n_states; ++s) {
        int best = greedy_action(base.q_star, s, mdp.n_actions);
        const double* row1 = after.q_star.data() + static_cast<std::size_t>(s) * mdp.n_actions;
        double max1 = *std::max_element(row1, row1 + mdp.n_actions);
        double margin = row1[best] - max1; // <= 0; near 0 when preserved
        if (first || margin < out.min_margin) {
            out.min_margin = margin;
            first = false;
        }
        if (margin < -tie_tol) {
            out.holds = false;
            out.violating_states.push_back(s);
        }
        for (int a = 0; a < mdp.n_actions; ++a) {
            double q0 = base.q(s, a, mdp.n_actions);
            double q1 = after.q(s, a, mdp.n_actions);
            double lower_violation = q0 - q1;                 // >0 breaks Q* <= Q1*
            double upper_violation = q1 - (q0 + inflate);     // >0 breaks the cap
            double violation = std::max(lower_violation, upper_violation);
            out.sandwich_slack = std::max(out.sandwich_slack, violation);
        }
    }
    if (out.sandwich_slack > tol) {
        out.holds = false;
    }
    return out;
}

Theorem2Result check_theorem2(const TabularMDP& mdp, const StochasticPolicy& pi,
                              const ConfidenceTable& conf, double kappa, double tol) {
    validate_policy(mdp, pi);
    if (conf.values.size() != static_cast<std::size_t>(mdp.n_states) * mdp.n_actions)
        throw validation_error("confidence table shape mismatch");
    for (double c : conf.values)
        if (c < 0.0 || c > 1.0) throw validation_error("confidence outside [0,1]");

    // evaluate pi accurately enough for a 1e-9 comparison
    double pe_tol = 0.1 * tol * (1.0 - mdp.gamma) / std::max(mdp.gamma, 0.5);
    std::vector<double> v_pi = policy_evaluation(mdp, pi, pe_tol);
    std::vector<double> q_pi = policy_q(mdp, v_pi);

    const int A = mdp.n_actions;
    StochasticPolicy pi_new = pi;
    for (int s = 0; s < mdp.n_states; ++s) {
        int best = greedy_action(q_pi, s, A);
        const double* conf_row = conf.values.data() + static_cast<std::size_t>(s) * A;
        for (int a = 0; a < A; ++a) {
            if (a == best) continue;
            if (!(conf_row[best] > conf_row[a]))
                throw contract_error("confidence precondition violated at state " +
                                     std::to_string(s) + ": conf(s,a*) must dominate");
        }
        if (conf_row[best] >= kappa) {
            double* row = pi_new.probs.data() + static_cast<std::size_t>(s) * A;
            std::fill(row, row + A, 0.0);
            row[best] = 1.0;
        }
    }

    std::vector<double> v_new = policy_evaluation(mdp, pi_new, pe_tol);
    Theorem2Result out;
    out.holds = true;
    out.min_gap = 0.0;
    for (int s = 0; s < mdp.n_states; ++s) {
        double gap = v_new[s] - v_pi[s];
        if (s == 0 || gap < out.min_gap) out.min_gap = gap;
        if (gap < -tol) out.holds = false;
    }
    return out;
}

TabularMDP gridworld_to_mdp(const GridSpec& spec, double gamma) {
    TabularMDP mdp;
    mdp.n_states = spec.n_cells();
    mdp.n_actions = kNumActions;
    mdp.gamma = gamma;
    mdp.transition.assign(
        static_cast<std::size_t>(mdp.n_states) * mdp.n_actions * mdp.n_states, 0.0);
    mdp.reward.assign(static_cast<std::size_t>(mdp.n_states) * mdp.n_actions, 0.0);

    for (int idx = 0; idx < mdp.n_states; ++idx) {
        Cell cell = spec.cell_at(idx);
        bool absorbing = spec.is_wall(cell) || spec.is_cliff(cell) || spec.is_goal(cell);
        for (int a = 0; a < kNumActions; ++a) {
            double* row = mdp.transition.data() +
                          (static_cast<std::size_t>(idx) * kNumActions + a) * mdp.n_states;
            if (absorbing) {
                row[idx] = 1.0;
                continue;
            }
            Cell next = cell;
            switch (static_cast<GridAction>(a)) {
                case GridAction::up: next.row -= 1; break;
                case GridAction::down: next.row += 1; break;
                case GridAction::left: next.col -= 1; break;
                case GridAction::right: next.col += 1; break;
            }
            if (!spec.in_bounds(next) || spec.is_wall(next)) next = cell;
            int next_idx = spec.cell_index(next);
            row[next_idx] = 1.0;
            double r = spec.step_reward;
            if (spec.is_cliff(next)) r = spec.cliff_reward;
            else if (spec.is_goal(next)) r = spec.step_reward + spec.goal_reward;
            mdp.reward[static_cast<std::size_t>(idx) * kNumActions + a] = r;
        }
    }
    return mdp;
}

} // namespace ada
