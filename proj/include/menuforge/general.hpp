#ifndef MENUFORGE_GENERAL_HPP
#define MENUFORGE_GENERAL_HPP

#include <string>
#include <utility>
#include <vector>

#include "menuforge/geometry.hpp"
#include "menuforge/report.hpp"

namespace menuforge {

// Cheapest mixture of actions reproducing belief p conditional on signal
// realization sigma. Throws HullError when p is outside the conditional
// hull.
double conditional_cost_curve(const ProblemInstance& inst, std::size_t signal, const Belief& p);

// Necessary condition for a plan to be implementable: at every realization
// the assigned action must sit on the conditional cost curve's lower
// boundary.
struct PrecheckEntry {
    std::size_t signal = 0;
    double curve_value = 0.0;
    double plan_cost = 0.0;
    bool pass = false;
};

std::vector<PrecheckEntry> plan_precheck(const ProblemInstance& inst, const Plan& plan);
bool plan_precheck_passes(const ProblemInstance& inst, const Plan& plan);

enum class GeneralStatus { Optimal, NotElicitable };
enum class Formulation { PerSignal, PerBeliefPair };  // one piece per sigma vs per (a, sigma-or-none)

// Solution of the menu-design LP. pieces carry human-readable labels
// ("sigma" for PerSignal, "action|sigma" / "action|-" for PerBeliefPair);
// the menu is their upper envelope with designations at the anchor beliefs.
struct GeneralSolution {
    GeneralStatus status = GeneralStatus::NotElicitable;
    Formulation formulation = Formulation::PerSignal;
    std::vector<std::pair<std::string, AffinePiece>> pieces;
    Menu menu;
    double objective = 0.0;
    // Smallest slack per constraint family: no_acquire_incentive,
    // conditional_incentive, participation, limited_liability, coupling.
    std::vector<std::pair<std::string, double>> family_slacks;
    std::vector<std::pair<std::string, bool>> binding;

    // Two per piece: slope vector and intercept.
    std::size_t parameter_count() const { return 2 * pieces.size(); }
};

// Minimum expected payment implementing the plan, one menu piece per signal
// realization. status == NotElicitable when the plan admits no
// incentive-compatible menu.
GeneralSolution solve_general_p6(const ProblemInstance& inst, const Plan& plan);

// Same optimum through the richer parameterization with one piece per
// (action, signal-or-none) pair.
GeneralSolution solve_general_p5(const ProblemInstance& inst, const Plan& plan);

}  // namespace menuforge

#endif
