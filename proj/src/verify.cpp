#include "menuforge/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "menuforge/errors.hpp"
#include "menuforge/lp.hpp"

namespace menuforge {
namespace {

// Best (action, piece) pair at a belief, lowest indices on float ties.
std::pair<std::pair<int, int>, double> best_pair(const Menu& menu,
                                                 const ProblemInstance& inst,
                                                 const Belief& (*belief_of)(const ProblemInstance&,
                                                                            std::size_t,
                                                                            std::size_t),
                                                 std::size_t signal) {
    std::pair<int, int> arg{0, 0};
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < inst.action_count(); ++a) {
        const Belief& p = belief_of(inst, a, signal);
        for (std::size_t k = 0; k < menu.pieces.size(); ++k) {
            double u = menu.pieces[k].eval(p) - inst.cost(a);
            if (u > best + kAbsTol) {
                best = u;
                arg = {static_cast<int>(a), static_cast<int>(k)};
            }
        }
    }
    return {arg, best};
}

const Belief& marginal_of(const ProblemInstance& inst, std::size_t a, std::size_t) {
    return inst.marginal(a);
}

const Belief& conditional_of(const ProblemInstance& inst, std::size_t a, std::size_t s) {
    return inst.conditional(a, s);
}

}  // namespace

DeviationStrategy agent_best_response(const Menu& menu, const ProblemInstance& inst) {
    if (menu.pieces.empty()) throw PreconditionError("best response against an empty menu");
    if (menu.outcome_count() != inst.outcome_count())
        throw DimensionError("menu/instance outcome dimension", inst.outcome_count(),
                             menu.outcome_count());

    auto [no_choice, no_value] = best_pair(menu, inst, marginal_of, 0);

    DeviationStrategy acquire;
    acquire.acquire = true;
    double acq_value = -inst.kappa();
    for (std::size_t s = 0; s < inst.signal_count(); ++s) {
        auto [choice, value] = best_pair(menu, inst, conditional_of, s);
        acquire.choices.push_back(choice);
        acq_value += inst.q()[s] * value;
    }
    acquire.utility = acq_value;

    if (acq_value >= no_value - kAbsTol) return acquire;
    DeviationStrategy blind;
    blind.acquire = false;
    blind.choices = {no_choice};
    blind.utility = no_value;
    return blind;
}

Certificate verify_menu(const Menu& menu,
                        const ProblemInstance& inst,
                        const Plan& plan,
                        double tol) {
    inst.validate_plan(plan);
    if (menu.outcome_count() != inst.outcome_count())
        throw DimensionError("menu/instance outcome dimension", inst.outcome_count(),
                             menu.outcome_count());

    double plan_utility;
    if (plan.acquire) {
        plan_utility = -inst.kappa();
        for (std::size_t s = 0; s < inst.signal_count(); ++s) {
            std::size_t a = static_cast<std::size_t>(plan.action_by_signal[s]);
            plan_utility += inst.q()[s] * (menu_eval(menu, inst.conditional(a, s)) - inst.cost(a));
        }
    } else {
        std::size_t a = static_cast<std::size_t>(plan.blind_action());
        plan_utility = menu_eval(menu, inst.marginal(a)) - inst.cost(a);
    }

    Certificate cert;
    cert.plan_utility = plan_utility;
    cert.best_deviation = agent_best_response(menu, inst);
    cert.tolerance = tol;

    double ll = std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w < menu.outcome_count(); ++w)
        ll = std::min(ll, min_payment(menu, w));

    cert.slacks = {{"incentive", plan_utility - cert.best_deviation.utility},
                   {"participation", plan_utility},
                   {"limited_liability", ll}};
    cert.pass = true;
    for (const auto& [name, slack] : cert.slacks)
        if (slack < -tol) cert.pass = false;
    return cert;
}

double Certificate::slack(const std::string& name) const {
    for (const auto& [key, value] : slacks)
        if (key == name) return value;
    throw Error("unknown slack family '" + name + "'");
}

namespace {

OracleSolution ia_oracle_impl(const IAInstance& inst, bool corner_pieces) {
    const std::size_t n = inst.outcome_count();
    const std::size_t S = inst.signal_count();

    std::vector<Belief> anchors;
    for (std::size_t s = 0; s < S; ++s) anchors.push_back(inst.posterior(s));
    anchors.push_back(inst.prior());
    if (corner_pieces) {
        for (std::size_t w = 0; w < n; ++w) {
            std::vector<double> corner(n, 0.0);
            corner[w] = 1.0;
            anchors.emplace_back(std::move(corner));
        }
    }
    const std::size_t K = anchors.size();
    const std::size_t nvars = K * (n + 1);
    auto base = [&](std::size_t k) { return k * (n + 1); };
    auto add_h = [&](std::vector<double>& row, std::size_t k, const Belief& p, double factor) {
        for (std::size_t w = 0; w < n; ++w) row[base(k) + w] += factor * p[w];
        row[base(k) + n] -= factor;
    };

    LinearProgram lp;
    lp.direction = LpDirection::Minimize;
    lp.objective.assign(nvars, 0.0);
    for (std::size_t s = 0; s < S; ++s) add_h(lp.objective, s, anchors[s], inst.q()[s]);

    // Acquiring must beat reading any single piece at the prior.
    for (std::size_t k = 0; k < K; ++k) {
        LpConstraint row;
        row.coeffs.assign(nvars, 0.0);
        for (std::size_t s = 0; s < S; ++s) add_h(row.coeffs, s, anchors[s], inst.q()[s]);
        add_h(row.coeffs, k, inst.prior(), -1.0);
        row.relation = LpRelation::GreaterEq;
        row.rhs = inst.kappa();
        lp.constraints.push_back(std::move(row));
    }
    // Limited liability at the corners of every piece.
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t w = 0; w < n; ++w) {
            LpConstraint row;
            row.coeffs.assign(nvars, 0.0);
            row.coeffs[base(k) + w] = 1.0;
            row.coeffs[base(k) + n] = -1.0;
            row.relation = LpRelation::GreaterEq;
            row.rhs = 0.0;
            lp.constraints.push_back(std::move(row));
        }
    }
    // Every piece attains the envelope at its own anchor.
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t j = 0; j < K; ++j) {
            if (j == k) continue;
            LpConstraint row;
            row.coeffs.assign(nvars, 0.0);
            add_h(row.coeffs, k, anchors[k], 1.0);
            add_h(row.coeffs, j, anchors[k], -1.0);
            row.relation = LpRelation::GreaterEq;
            row.rhs = 0.0;
            lp.constraints.push_back(std::move(row));
        }
    }

    LpOutcome out = solve_lp(lp);
    if (out.status != LpStatus::Optimal)
        throw Error("information-acquisition oracle LP did not reach an optimum");

    OracleSolution sol;
    sol.objective = out.value;
    for (std::size_t k = 0; k < K; ++k) {
        AffinePiece piece;
        piece.slope.assign(out.solution.begin() + base(k), out.solution.begin() + base(k) + n);
        piece.intercept = out.solution[base(k) + n];
        sol.menu.pieces.push_back(std::move(piece));
        sol.menu.designations.push_back({anchors[k], k});
    }
    return sol;
}

// splitmix64: tiny deterministic generator, stable across platforms.
struct SplitMix {
    unsigned long long state;
    double uniform() {
        state += 0x9e3779b97f4a7c15ULL;
        unsigned long long z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z = z ^ (z >> 31);
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }
};

}  // namespace

OracleSolution ia_lp_oracle(const IAInstance& inst) { return ia_oracle_impl(inst, false); }

OracleSolution ia_lp_oracle_dense(const IAInstance& inst) { return ia_oracle_impl(inst, true); }

ProbeResult cost_curve_property_probe(const ContractInstance& inst,
                                      int trials,
                                      unsigned long long seed) {
    ProbeResult result;
    result.trials = trials;
    SplitMix rng{seed};
    const std::size_t A = inst.action_count();
    const std::size_t n = inst.outcome_count();
    for (int trial = 0; trial < trials; ++trial) {
        std::vector<double> lambda(A);
        double sum = 0.0;
        for (double& l : lambda) {
            l = -std::log(1.0 - rng.uniform());
            sum += l;
        }
        for (double& l : lambda) l /= sum;

        std::vector<double> p(n, 0.0);
        double mixed_cost = 0.0;
        for (std::size_t a = 0; a < A; ++a) {
            mixed_cost += lambda[a] * inst.cost(a);
            for (std::size_t w = 0; w < n; ++w) p[w] += lambda[a] * inst.belief(a)[w];
        }
        double psum = 0.0;
        for (double x : p) psum += x;
        for (double& x : p) x /= psum;

        double curve = cost_curve_eval(inst, Belief(std::move(p)));
        double violation = curve - mixed_cost;
        result.worst_violation = std::max(result.worst_violation, violation);
        if (violation > kDefaultVerifyTol) result.pass = false;
    }
    return result;
}

}  // namespace menuforge
