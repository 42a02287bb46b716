#include "menuforge/general.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "menuforge/errors.hpp"
#include "menuforge/lp.hpp"
#include "menuforge/numeric.hpp"

namespace menuforge {
namespace {

// Column layout: each piece owns n slope columns plus one intercept column.
struct PieceLayout {
    std::size_t n;
    std::size_t base(std::size_t piece) const { return piece * (n + 1); }

    // Adds factor * h_piece(p) = factor * (x . p - y) to a coefficient row.
    void add_h(std::vector<double>& row,
               std::size_t piece,
               const Belief& p,
               double factor) const {
        std::size_t b = base(piece);
        for (std::size_t w = 0; w < n; ++w) row[b + w] += factor * p[w];
        row[b + n] -= factor;
    }
};

double piece_value(const AffinePiece& piece, const Belief& p) { return piece.eval(p); }

// Shared post-solve evaluation: rebuild the slack of every constraint family
// from the pieces themselves rather than from tableau bookkeeping.
void fill_slacks(GeneralSolution& sol,
                 const ProblemInstance& inst,
                 const Plan& plan,
                 const std::vector<std::size_t>& plan_piece) {
    const std::size_t S = inst.signal_count();
    const std::size_t A = inst.action_count();
    const auto& pieces = sol.pieces;

    auto envelope = [&](const Belief& p) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& lp : pieces) best = std::max(best, piece_value(lp.second, p));
        return best;
    };

    double plan_cost = 0.0;
    double plan_value = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
        std::size_t a = static_cast<std::size_t>(plan.action_by_signal[s]);
        plan_cost += inst.q()[s] * inst.cost(a);
        plan_value +=
            inst.q()[s] * piece_value(pieces[plan_piece[s]].second, inst.conditional(a, s));
    }
    double plan_utility = plan_value - plan_cost - inst.kappa();

    double na = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < A; ++a)
        na = std::min(na, plan_utility - (envelope(inst.marginal(a)) - inst.cost(a)));

    double cond = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < S; ++s) {
        std::size_t fa = static_cast<std::size_t>(plan.action_by_signal[s]);
        double plan_side =
            piece_value(pieces[plan_piece[s]].second, inst.conditional(fa, s)) - inst.cost(fa);
        for (std::size_t a = 0; a < A; ++a)
            cond = std::min(cond,
                            plan_side - (envelope(inst.conditional(a, s)) - inst.cost(a)));
    }

    double ll = std::numeric_limits<double>::infinity();
    for (const auto& lp : pieces)
        for (std::size_t w = 0; w < lp.second.slope.size(); ++w)
            ll = std::min(ll, lp.second.slope[w] - lp.second.intercept);

    // Designated piece vs the best competing piece at each anchor; vacuous
    // (+inf) for single-piece menus.
    double coupling = std::numeric_limits<double>::infinity();
    for (const auto& d : sol.menu.designations) {
        double own = piece_value(pieces[d.piece].second, d.anchor);
        double rival = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < pieces.size(); ++k)
            if (k != d.piece) rival = std::max(rival, piece_value(pieces[k].second, d.anchor));
        if (std::isfinite(rival)) coupling = std::min(coupling, own - rival);
    }

    sol.family_slacks = {{"no_acquire_incentive", na},
                         {"conditional_incentive", cond},
                         {"participation", plan_utility},
                         {"limited_liability", ll},
                         {"coupling", coupling}};
    sol.binding.clear();
    for (const auto& [name, slack] : sol.family_slacks)
        sol.binding.emplace_back(name, slack <= kDefaultVerifyTol);
}

}  // namespace

double conditional_cost_curve(const ProblemInstance& inst, std::size_t signal, const Belief& p) {
    if (signal >= inst.signal_count())
        throw DimensionError("signal index", inst.signal_count(), signal);
    const std::size_t n = inst.outcome_count();
    if (p.size() != n) throw DimensionError("belief dimension", n, p.size());
    const std::size_t A = inst.action_count();

    LinearProgram lp;
    lp.direction = LpDirection::Minimize;
    lp.objective = inst.costs();
    lp.bounds.assign(A, LpBounds{0.0, std::nullopt});
    for (std::size_t w = 0; w < n; ++w) {
        LpConstraint row;
        row.coeffs.resize(A);
        for (std::size_t a = 0; a < A; ++a) row.coeffs[a] = inst.conditional(a, signal)[w];
        row.relation = LpRelation::Equal;
        row.rhs = p[w];
        lp.constraints.push_back(std::move(row));
    }
    LpConstraint sum_row;
    sum_row.coeffs.assign(A, 1.0);
    sum_row.relation = LpRelation::Equal;
    sum_row.rhs = 1.0;
    lp.constraints.push_back(std::move(sum_row));

    LpOutcome out = solve_lp(lp);
    if (out.status == LpStatus::Infeasible)
        throw HullError("belief is outside the conditional hull at signal '" +
                        inst.signals()[signal] + "'");
    if (out.status != LpStatus::Optimal) throw Error("conditional cost curve LP did not solve");
    return out.value;
}

std::vector<PrecheckEntry> plan_precheck(const ProblemInstance& inst, const Plan& plan) {
    inst.validate_plan(plan);
    std::vector<PrecheckEntry> report;
    report.reserve(inst.signal_count());
    for (std::size_t s = 0; s < inst.signal_count(); ++s) {
        std::size_t a = static_cast<std::size_t>(plan.action_by_signal[s]);
        PrecheckEntry e;
        e.signal = s;
        e.plan_cost = inst.cost(a);
        e.curve_value = conditional_cost_curve(inst, s, inst.conditional(a, s));
        e.pass = std::fabs(e.plan_cost - e.curve_value) <= 1e-7 * (1.0 + std::fabs(e.plan_cost));
        report.push_back(e);
    }
    return report;
}

bool plan_precheck_passes(const ProblemInstance& inst, const Plan& plan) {
    auto report = plan_precheck(inst, plan);
    return std::all_of(report.begin(), report.end(), [](const PrecheckEntry& e) { return e.pass; });
}

GeneralSolution solve_general_p6(const ProblemInstance& inst, const Plan& plan) {
    inst.validate_plan(plan);
    if (!plan.acquire) throw PreconditionError("menu design expects an acquisition plan");
    const std::size_t n = inst.outcome_count();
    const std::size_t S = inst.signal_count();
    const std::size_t A = inst.action_count();
    PieceLayout layout{n};
    const std::size_t nvars = S * (n + 1);

    auto plan_action = [&](std::size_t s) {
        return static_cast<std::size_t>(plan.action_by_signal[s]);
    };
    auto plan_belief = [&](std::size_t s) -> const Belief& {
        return inst.conditional(plan_action(s), s);
    };
    double plan_cost = 0.0;
    for (std::size_t s = 0; s < S; ++s) plan_cost += inst.q()[s] * inst.cost(plan_action(s));

    LinearProgram lp;
    lp.direction = LpDirection::Minimize;
    lp.objective.assign(nvars, 0.0);
    for (std::size_t s = 0; s < S; ++s)
        layout.add_h(lp.objective, s, plan_belief(s), inst.q()[s]);

    auto plan_value_row = [&](std::vector<double>& row, double factor) {
        for (std::size_t s = 0; s < S; ++s)
            layout.add_h(row, s, plan_belief(s), factor * inst.q()[s]);
    };

    // No acquisition: committing to any action under any single piece must
    // not beat the plan.
    for (std::size_t sp = 0; sp < S; ++sp) {
        for (std::size_t a = 0; a < A; ++a) {
            LpConstraint row;
            row.coeffs.assign(nvars, 0.0);
            plan_value_row(row.coeffs, 1.0);
            layout.add_h(row.coeffs, sp, inst.marginal(a), -1.0);
            row.relation = LpRelation::GreaterEq;
            row.rhs = inst.kappa() + plan_cost - inst.cost(a);
            lp.constraints.push_back(std::move(row));
        }
    }
    // Conditional obedience: after seeing sigma, deviating to any action and
    // any piece must not beat following the plan.
    for (std::size_t a = 0; a < A; ++a) {
        for (std::size_t s = 0; s < S; ++s) {
            for (std::size_t sp = 0; sp < S; ++sp) {
                LpConstraint row;
                row.coeffs.assign(nvars, 0.0);
                layout.add_h(row.coeffs, s, plan_belief(s), 1.0);
                layout.add_h(row.coeffs, sp, inst.conditional(a, s), -1.0);
                row.relation = LpRelation::GreaterEq;
                row.rhs = inst.cost(plan_action(s)) - inst.cost(a);
                lp.constraints.push_back(std::move(row));
            }
        }
    }
    // Participation.
    {
        LpConstraint row;
        row.coeffs.assign(nvars, 0.0);
        plan_value_row(row.coeffs, 1.0);
        row.relation = LpRelation::GreaterEq;
        row.rhs = inst.kappa() + plan_cost;
        lp.constraints.push_back(std::move(row));
    }
    // Limited liability at every corner of every piece.
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t w = 0; w < n; ++w) {
            LpConstraint row;
            row.coeffs.assign(nvars, 0.0);
            row.coeffs[layout.base(s) + w] = 1.0;
            row.coeffs[layout.base(s) + n] = -1.0;
            row.relation = LpRelation::GreaterEq;
            row.rhs = 0.0;
            lp.constraints.push_back(std::move(row));
        }
    }
    // Each piece attains the envelope at its own anchor.
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t sp = 0; sp < S; ++sp) {
            if (sp == s) continue;
            LpConstraint row;
            row.coeffs.assign(nvars, 0.0);
            layout.add_h(row.coeffs, s, plan_belief(s), 1.0);
            layout.add_h(row.coeffs, sp, plan_belief(s), -1.0);
            row.relation = LpRelation::GreaterEq;
            row.rhs = 0.0;
            lp.constraints.push_back(std::move(row));
        }
    }

    GeneralSolution sol;
    sol.formulation = Formulation::PerSignal;
    LpOutcome out = solve_lp(lp);
    if (out.status == LpStatus::Infeasible) {
        sol.status = GeneralStatus::NotElicitable;
        return sol;
    }
    if (out.status != LpStatus::Optimal)
        throw Error("menu LP reported unbounded; expected payments are bounded below by zero");

    sol.status = GeneralStatus::Optimal;
    sol.objective = out.value;
    std::vector<std::size_t> plan_piece(S);
    for (std::size_t s = 0; s < S; ++s) {
        AffinePiece piece;
        piece.slope.assign(out.solution.begin() + layout.base(s),
                           out.solution.begin() + layout.base(s) + n);
        piece.intercept = out.solution[layout.base(s) + n];
        sol.pieces.emplace_back(inst.signals()[s], std::move(piece));
        plan_piece[s] = s;
    }
    for (const auto& [label, piece] : sol.pieces) sol.menu.pieces.push_back(piece);
    for (std::size_t s = 0; s < S; ++s) sol.menu.designations.push_back({plan_belief(s), s});
    fill_slacks(sol, inst, plan, plan_piece);
    return sol;
}

GeneralSolution solve_general_p5(const ProblemInstance& inst, const Plan& plan) {
    inst.validate_plan(plan);
    if (!plan.acquire) throw PreconditionError("menu design expects an acquisition plan");
    const std::size_t n = inst.outcome_count();
    const std::size_t S = inst.signal_count();
    const std::size_t A = inst.action_count();
    PieceLayout layout{n};
    // Piece index: a * (S + 1) + sigma for conditionals, a * (S + 1) + S for
    // the signal-less belief p_a.
    auto piece_id = [&](std::size_t a, std::size_t sbar) { return a * (S + 1) + sbar; };
    const std::size_t npieces = A * (S + 1);
    const std::size_t nvars = npieces * (n + 1);

    auto anchor = [&](std::size_t a, std::size_t sbar) -> const Belief& {
        return sbar < S ? inst.conditional(a, sbar) : inst.marginal(a);
    };
    auto plan_action = [&](std::size_t s) {
        return static_cast<std::size_t>(plan.action_by_signal[s]);
    };
    double plan_cost = 0.0;
    for (std::size_t s = 0; s < S; ++s) plan_cost += inst.q()[s] * inst.cost(plan_action(s));

    LinearProgram lp;
    lp.direction = LpDirection::Minimize;
    lp.objective.assign(nvars, 0.0);
    for (std::size_t s = 0; s < S; ++s)
        layout.add_h(lp.objective, piece_id(plan_action(s), s),
                     inst.conditional(plan_action(s), s), inst.q()[s]);

    auto plan_value_row = [&](std::vector<double>& row, double factor) {
        for (std::size_t s = 0; s < S; ++s)
            layout.add_h(row, piece_id(plan_action(s), s), inst.conditional(plan_action(s), s),
                         factor * inst.q()[s]);
    };

    // No acquisition with the piece earmarked for (a, no signal).
    for (std::size_t a = 0; a < A; ++a) {
        LpConstraint row;
        row.coeffs.assign(nvars, 0.0);
        plan_value_row(row.coeffs, 1.0);
        layout.add_h(row.coeffs, piece_id(a, S), inst.marginal(a), -1.0);
        row.relation = LpRelation::GreaterEq;
        row.rhs = inst.kappa() + plan_cost - inst.cost(a);
        lp.constraints.push_back(std::move(row));
    }
    // Conditional obedience against each (a, sigma) piece.
    for (std::size_t a = 0; a < A; ++a) {
        for (std::size_t s = 0; s < S; ++s) {
            LpConstraint row;
            row.coeffs.assign(nvars, 0.0);
            layout.add_h(row.coeffs, piece_id(plan_action(s), s),
                         inst.conditional(plan_action(s), s), 1.0);
            layout.add_h(row.coeffs, piece_id(a, s), inst.conditional(a, s), -1.0);
            row.relation = LpRelation::GreaterEq;
            row.rhs = inst.cost(plan_action(s)) - inst.cost(a);
            lp.constraints.push_back(std::move(row));
        }
    }
    // Participation.
    {
        LpConstraint row;
        row.coeffs.assign(nvars, 0.0);
        plan_value_row(row.coeffs, 1.0);
        row.relation = LpRelation::GreaterEq;
        row.rhs = inst.kappa() + plan_cost;
        lp.constraints.push_back(std::move(row));
    }
    // Limited liability.
    for (std::size_t pc = 0; pc < npieces; ++pc) {
        for (std::size_t w = 0; w < n; ++w) {
            LpConstraint row;
            row.coeffs.assign(nvars, 0.0);
            row.coeffs[layout.base(pc) + w] = 1.0;
            row.coeffs[layout.base(pc) + n] = -1.0;
            row.relation = LpRelation::GreaterEq;
            row.rhs = 0.0;
            lp.constraints.push_back(std::move(row));
        }
    }
    // Each piece attains the envelope at its own anchor belief.
    for (std::size_t a = 0; a < A; ++a) {
        for (std::size_t sbar = 0; sbar <= S; ++sbar) {
            std::size_t self = piece_id(a, sbar);
            for (std::size_t pc = 0; pc < npieces; ++pc) {
                if (pc == self) continue;
                LpConstraint row;
                row.coeffs.assign(nvars, 0.0);
                layout.add_h(row.coeffs, self, anchor(a, sbar), 1.0);
                layout.add_h(row.coeffs, pc, anchor(a, sbar), -1.0);
                row.relation = LpRelation::GreaterEq;
                row.rhs = 0.0;
                lp.constraints.push_back(std::move(row));
            }
        }
    }

    GeneralSolution sol;
    sol.formulation = Formulation::PerBeliefPair;
    LpOutcome out = solve_lp(lp);
    if (out.status == LpStatus::Infeasible) {
        sol.status = GeneralStatus::NotElicitable;
        return sol;
    }
    if (out.status != LpStatus::Optimal)
        throw Error("menu LP reported unbounded; expected payments are bounded below by zero");

    sol.status = GeneralStatus::Optimal;
    sol.objective = out.value;
    std::vector<std::size_t> plan_piece(S);
    for (std::size_t a = 0; a < A; ++a) {
        for (std::size_t sbar = 0; sbar <= S; ++sbar) {
            std::size_t pc = piece_id(a, sbar);
            AffinePiece piece;
            piece.slope.assign(out.solution.begin() + layout.base(pc),
                               out.solution.begin() + layout.base(pc) + n);
            piece.intercept = out.solution[layout.base(pc) + n];
            std::string label =
                inst.actions()[a] + "|" + (sbar < S ? inst.signals()[sbar] : std::string("-"));
            sol.pieces.emplace_back(std::move(label), std::move(piece));
        }
    }
    for (std::size_t s = 0; s < S; ++s) plan_piece[s] = piece_id(plan_action(s), s);
    for (const auto& [label, piece] : sol.pieces) sol.menu.pieces.push_back(piece);
    for (std::size_t a = 0; a < A; ++a)
        for (std::size_t sbar = 0; sbar <= S; ++sbar)
            sol.menu.designations.push_back({anchor(a, sbar), piece_id(a, sbar)});
    fill_slacks(sol, inst, plan, plan_piece);
    return sol;
}

}  // namespace menuforge
