#ifndef MENUFORGE_VERIFY_HPP
#define MENUFORGE_VERIFY_HPP

#include "menuforge/contracts.hpp"
#include "menuforge/geometry.hpp"
#include "menuforge/ia.hpp"
#include "menuforge/numeric.hpp"
#include "menuforge/report.hpp"

namespace menuforge {

// Exhaustive best response against a menu: the better of the best
// commit-without-looking strategy and the best signal-contingent strategy.
// Acquisition wins ties within 1e-9.
DeviationStrategy agent_best_response(const Menu& menu, const ProblemInstance& inst);

// Checks incentive compatibility, participation, and limited liability of a
// menu for a given plan. Slacks are reported even on failure.
Certificate verify_menu(const Menu& menu,
                        const ProblemInstance& inst,
                        const Plan& plan,
                        double tol = kDefaultVerifyTol);

// Independent optimum for the information-acquisition problem: a direct LP
// over one menu piece per signal realization plus one anchored at the prior.
struct OracleSolution {
    double objective = 0.0;
    Menu menu;
};

OracleSolution ia_lp_oracle(const IAInstance& inst);

// Denser variant with extra pieces anchored at every simplex corner; same
// optimum, used to cross-check the sparse oracle.
OracleSolution ia_lp_oracle_dense(const IAInstance& inst);

// Samples random action mixtures and checks the cost curve never exceeds the
// mixed cost. Deterministic for a fixed seed.
struct ProbeResult {
    bool pass = true;
    int trials = 0;
    double worst_violation = 0.0;
};

ProbeResult cost_curve_property_probe(const ContractInstance& inst,
                                      int trials = 200,
                                      unsigned long long seed = 1);

}  // namespace menuforge

#endif
