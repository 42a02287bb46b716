#include "menuforge/contracts.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "menuforge/errors.hpp"
#include "menuforge/lp.hpp"
#include "menuforge/numeric.hpp"

namespace menuforge {
namespace {

double elicitability_threshold(double target_cost) {
    return 1e-7 * (1.0 + std::fabs(target_cost));
}

// max m s.t. v . (p_a - anchor) <= c_a - anchor_cost for all actions,
//            m <= v(omega) - v . anchor for all omega.
// Variables: v (free), m (free). The optimum m is the worst-coordinate
// advantage of the best subtangent at (anchor, anchor_cost).
LpOutcome subtangent_lp(const ContractInstance& inst, const Belief& anchor, double anchor_cost) {
    const std::size_t n = inst.outcome_count();
    LinearProgram lp;
    lp.direction = LpDirection::Maximize;
    lp.objective.assign(n + 1, 0.0);
    lp.objective[n] = 1.0;
    for (std::size_t a = 0; a < inst.action_count(); ++a) {
        LpConstraint row;
        row.coeffs.assign(n + 1, 0.0);
        for (std::size_t w = 0; w < n; ++w) row.coeffs[w] = inst.belief(a)[w] - anchor[w];
        row.relation = LpRelation::LessEq;
        row.rhs = inst.cost(a) - anchor_cost;
        lp.constraints.push_back(std::move(row));
    }
    for (std::size_t w = 0; w < n; ++w) {
        LpConstraint row;
        row.coeffs.assign(n + 1, 0.0);
        for (std::size_t u = 0; u < n; ++u) row.coeffs[u] = anchor[u];
        row.coeffs[w] -= 1.0;
        row.coeffs[n] = 1.0;  // m + v.anchor - v(omega) <= 0
        row.relation = LpRelation::LessEq;
        row.rhs = 0.0;
        lp.constraints.push_back(std::move(row));
    }
    return solve_lp(lp);
}

Contract shifted_subtangent(const ContractInstance& inst,
                            const std::vector<double>& v,
                            const Belief& anchor,
                            double anchor_cost,
                            double beta) {
    const std::size_t n = inst.outcome_count();
    double va = dot(v, anchor.weights());
    std::vector<double> t(n);
    for (std::size_t w = 0; w < n; ++w) t[w] = anchor_cost + v[w] - va + beta;
    return Contract(std::move(t));
}

std::vector<double> normalize_min_zero(std::vector<double> v) {
    double lo = *std::min_element(v.begin(), v.end());
    for (double& x : v) x -= lo;
    return v;
}

}  // namespace

ContractInstance::ContractInstance(OutcomeSpace outcomes,
                                   std::vector<std::string> actions,
                                   std::vector<Belief> beliefs,
                                   std::vector<double> costs,
                                   std::size_t target)
    : outcomes_(std::move(outcomes)),
      actions_(std::move(actions)),
      beliefs_(std::move(beliefs)),
      costs_(std::move(costs)),
      target_(target) {
    if (actions_.empty()) throw ValidationError("instance needs at least one action");
    std::set<std::string> seen(actions_.begin(), actions_.end());
    if (seen.size() != actions_.size()) throw ValidationError("duplicate action label");
    if (beliefs_.size() != actions_.size())
        throw DimensionError("belief count", actions_.size(), beliefs_.size());
    for (const auto& b : beliefs_)
        if (b.size() != outcomes_.size())
            throw DimensionError("belief dimension", outcomes_.size(), b.size());
    if (costs_.size() != actions_.size())
        throw DimensionError("cost count", actions_.size(), costs_.size());
    for (double c : costs_)
        if (!std::isfinite(c) || c < 0.0)
            throw ValidationError("action costs must be finite and non-negative");
    if (target_ >= actions_.size())
        throw ValidationError("target action index " + std::to_string(target_) + " out of range");
}

ProblemInstance ContractInstance::to_problem() const {
    std::vector<std::vector<Belief>> conditionals;
    conditionals.reserve(actions_.size());
    for (const auto& b : beliefs_) conditionals.push_back({b});
    return ProblemInstance(outcomes_, {"_"}, actions_, {1.0}, std::move(conditionals), costs_,
                           0.0);
}

Plan ContractInstance::canonical_plan() const {
    Plan plan;
    plan.acquire = true;
    plan.action_by_signal = {static_cast<int>(target_)};
    return plan;
}

double cost_curve_eval(const ContractInstance& inst, const Belief& p) {
    const std::size_t n = inst.outcome_count();
    if (p.size() != n) throw DimensionError("belief dimension", n, p.size());
    const std::size_t k = inst.action_count();
    LinearProgram lp;
    lp.direction = LpDirection::Minimize;
    lp.objective = inst.costs();
    lp.bounds.assign(k, LpBounds{0.0, std::nullopt});
    for (std::size_t w = 0; w < n; ++w) {
        LpConstraint row;
        row.coeffs.resize(k);
        for (std::size_t a = 0; a < k; ++a) row.coeffs[a] = inst.belief(a)[w];
        row.relation = LpRelation::Equal;
        row.rhs = p[w];
        lp.constraints.push_back(std::move(row));
    }
    LpConstraint sum_row;
    sum_row.coeffs.assign(k, 1.0);
    sum_row.relation = LpRelation::Equal;
    sum_row.rhs = 1.0;
    lp.constraints.push_back(std::move(sum_row));

    LpOutcome out = solve_lp(lp);
    if (out.status == LpStatus::Infeasible)
        throw HullError("belief is outside the convex hull of the action beliefs");
    if (out.status != LpStatus::Optimal) throw Error("cost curve LP did not solve");
    return out.value;
}

ElicitabilityCheck check_elicitability(const ContractInstance& inst) {
    ElicitabilityCheck chk;
    chk.curve_value = cost_curve_eval(inst, inst.belief(inst.target()));
    chk.gap = inst.cost(inst.target()) - chk.curve_value;
    double threshold = elicitability_threshold(inst.cost(inst.target()));
    chk.elicitable = std::fabs(chk.gap) <= threshold;
    double mag = std::fabs(chk.gap);
    chk.marginal = mag >= threshold / 10.0 && mag <= threshold * 10.0;
    return chk;
}

bool is_elicitable(const ContractInstance& inst) {
    return check_elicitability(inst).elicitable;
}

ContractSolution optimal_contract(const ContractInstance& inst) {
    if (!is_elicitable(inst))
        throw NotElicitableError("target action '" + inst.actions()[inst.target()] +
                                 "' is not elicitable: its cost point is not on lower boundary "
                                 "of the cost curve (a cheaper action mixture matches its "
                                 "outcome distribution)");
    const std::size_t n = inst.outcome_count();
    const Belief& anchor = inst.belief(inst.target());
    double c_star = inst.cost(inst.target());

    LpOutcome out = subtangent_lp(inst, anchor, c_star);
    if (out.status != LpStatus::Optimal)
        throw NotElicitableError("subtangent polytope is empty for the target action");
    std::vector<double> v(out.solution.begin(), out.solution.begin() + n);
    double m = out.value;
    double beta = std::max(0.0, -(c_star + m));

    ContractSolution sol{shifted_subtangent(inst, v, anchor, c_star, beta), beta, c_star + beta,
                         normalize_min_zero(v)};
    return sol;
}

Menu enumerate_optimal_menu(const ContractInstance& inst,
                            const std::vector<Contract>& candidates) {
    ContractSolution base = optimal_contract(inst);
    const std::size_t n = inst.outcome_count();

    std::vector<double> curve(inst.action_count());
    for (std::size_t a = 0; a < inst.action_count(); ++a)
        curve[a] = cost_curve_eval(inst, inst.belief(a));

    Menu menu;
    menu.pieces.push_back(AffinePiece::from_contract(base.contract));
    for (const auto& cand : candidates) {
        if (cand.size() != n)
            throw DimensionError("candidate contract dimension", n, cand.size());
        bool keep = true;
        for (std::size_t a = 0; a < inst.action_count() && keep; ++a) {
            double mean = expected_payment(cand, inst.belief(a));
            double tol = kAbsTol + kRelTol * std::max(1.0, std::fabs(curve[a]));
            if (mean - base.beta > curve[a] + tol) keep = false;
        }
        for (std::size_t w = 0; w < n && keep; ++w)
            if (cand[w] < -kAbsTol) keep = false;
        if (keep) menu.pieces.push_back(AffinePiece::from_contract(cand));
    }
    menu.designations.push_back({inst.belief(inst.target()), 0});
    return menu;
}

bool is_strictly_elicitable(const ContractInstance& inst) {
    if (!is_elicitable(inst)) return false;
    const std::size_t k = inst.action_count();
    if (k == 1) return true;

    // Cheapest mixture of the other actions matching the target's belief.
    const std::size_t n = inst.outcome_count();
    LinearProgram lp;
    lp.direction = LpDirection::Minimize;
    lp.objective.reserve(k - 1);
    std::vector<std::size_t> others;
    for (std::size_t a = 0; a < k; ++a) {
        if (a == inst.target()) continue;
        others.push_back(a);
        lp.objective.push_back(inst.cost(a));
    }
    lp.bounds.assign(others.size(), LpBounds{0.0, std::nullopt});
    for (std::size_t w = 0; w < n; ++w) {
        LpConstraint row;
        row.coeffs.resize(others.size());
        for (std::size_t i = 0; i < others.size(); ++i) row.coeffs[i] = inst.belief(others[i])[w];
        row.relation = LpRelation::Equal;
        row.rhs = inst.belief(inst.target())[w];
        lp.constraints.push_back(std::move(row));
    }
    LpConstraint sum_row;
    sum_row.coeffs.assign(others.size(), 1.0);
    sum_row.relation = LpRelation::Equal;
    sum_row.rhs = 1.0;
    lp.constraints.push_back(std::move(sum_row));

    LpOutcome out = solve_lp(lp);
    if (out.status == LpStatus::Infeasible) return true;
    if (out.status != LpStatus::Optimal) throw Error("strict elicitability LP did not solve");
    double c_star = inst.cost(inst.target());
    return out.value - c_star > elicitability_threshold(c_star);
}

StrictSubgradient strict_subgradient(const ContractInstance& inst) {
    if (!is_strictly_elicitable(inst))
        throw NotElicitableError("target action '" + inst.actions()[inst.target()] +
                                 "' is not strictly elicitable");
    const std::size_t n = inst.outcome_count();
    const Belief& anchor = inst.belief(inst.target());
    double c_star = inst.cost(inst.target());
    double cmax = *std::max_element(inst.costs().begin(), inst.costs().end());
    double cmin = *std::min_element(inst.costs().begin(), inst.costs().end());
    double box = 1.0 + 10.0 * (cmax - cmin + 1.0);

    LinearProgram lp;
    lp.direction = LpDirection::Maximize;
    lp.objective.assign(n + 1, 0.0);
    lp.objective[n] = 1.0;
    lp.bounds.assign(n + 1, LpBounds{});
    for (std::size_t w = 0; w < n; ++w) lp.bounds[w] = LpBounds{-box, box};
    for (std::size_t a = 0; a < inst.action_count(); ++a) {
        if (a == inst.target()) continue;
        double gap = 0.0;
        for (std::size_t w = 0; w < n; ++w)
            gap = std::max(gap, std::fabs(inst.belief(a)[w] - anchor[w]));
        // Actions sharing the target's belief cannot be separated by slope;
        // strict elicitability already forces their cost strictly higher.
        if (gap <= kAbsTol) continue;
        LpConstraint row;
        row.coeffs.assign(n + 1, 0.0);
        for (std::size_t w = 0; w < n; ++w) row.coeffs[w] = inst.belief(a)[w] - anchor[w];
        row.coeffs[n] = 1.0;
        row.relation = LpRelation::LessEq;
        row.rhs = inst.cost(a) - c_star;
        lp.constraints.push_back(std::move(row));
    }
    // Keeps the margin bounded when no separating rows exist at all.
    LpConstraint cap;
    cap.coeffs.assign(n + 1, 0.0);
    cap.coeffs[n] = 1.0;
    cap.relation = LpRelation::LessEq;
    cap.rhs = 1.0 + box;
    lp.constraints.push_back(std::move(cap));

    LpOutcome out = solve_lp(lp);
    if (out.status != LpStatus::Optimal || out.value <= kDefaultVerifyTol)
        throw NotElicitableError("target action is not strictly elicitable at tolerance");
    StrictSubgradient sg;
    sg.slope = normalize_min_zero({out.solution.begin(), out.solution.begin() + n});
    sg.margin = out.value;
    return sg;
}

ContractSolution strict_epsilon_optimal(const ContractInstance& inst, double epsilon) {
    if (!(epsilon > 0.0)) throw PreconditionError("epsilon must be positive");
    ContractSolution weak = optimal_contract(inst);
    StrictSubgradient sg = strict_subgradient(inst);

    const std::size_t n = inst.outcome_count();
    const Belief& anchor = inst.belief(inst.target());
    double c_star = inst.cost(inst.target());
    double va = dot(sg.slope, anchor.weights());
    double min_v = *std::min_element(sg.slope.begin(), sg.slope.end());
    double beta2 = std::max(0.0, -(c_star + min_v - va));
    Contract strict = shifted_subtangent(inst, sg.slope, anchor, c_star, beta2);

    double alpha = beta2 > weak.beta + kAbsTol
                       ? std::min(0.5, epsilon / (beta2 - weak.beta))
                       : 0.5;
    std::vector<double> t(n);
    for (std::size_t w = 0; w < n; ++w)
        t[w] = (1.0 - alpha) * weak.contract[w] + alpha * strict[w];

    ContractSolution sol{Contract(std::move(t)), weak.beta + alpha * (beta2 - weak.beta), 0.0,
                         sg.slope};
    sol.objective = expected_payment(sol.contract, anchor);
    return sol;
}

std::vector<Contract> default_menu_candidates(const ContractInstance& inst) {
    ContractSolution base = optimal_contract(inst);
    const std::size_t n = inst.outcome_count();
    std::vector<Contract> out;
    for (std::size_t a = 0; a < inst.action_count(); ++a) {
        double cv = cost_curve_eval(inst, inst.belief(a));
        LpOutcome lp = subtangent_lp(inst, inst.belief(a), cv);
        if (lp.status != LpStatus::Optimal) continue;
        std::vector<double> v(lp.solution.begin(), lp.solution.begin() + n);
        Contract cand = shifted_subtangent(inst, v, inst.belief(a), cv, base.beta);
        bool duplicate = false;
        for (const auto& seen : out) {
            bool same = true;
            for (std::size_t w = 0; w < n && same; ++w)
                if (std::fabs(seen[w] - cand[w]) > 1e-12) same = false;
            if (same) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) out.push_back(std::move(cand));
    }
    return out;
}

}  // namespace menuforge
