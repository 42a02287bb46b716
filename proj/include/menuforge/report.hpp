#ifndef MENUFORGE_REPORT_HPP
#define MENUFORGE_REPORT_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "menuforge/geometry.hpp"

namespace menuforge {

// One way the agent can behave against a menu: skip the signal and commit to
// a single (action, contract) pair, or acquire it and choose a pair per
// realization.
struct DeviationStrategy {
    bool acquire = false;
    // Per-signal (action, piece index) when acquire; a single entry otherwise.
    std::vector<std::pair<int, int>> choices;
    double utility = 0.0;
};

// Outcome of checking a menu against an instance and plan.
struct Certificate {
    double plan_utility = 0.0;
    DeviationStrategy best_deviation;
    // Named slacks, non-negative when satisfied: "incentive" (plan utility
    // minus best deviation utility), "participation" (plan utility), and
    // "limited_liability" (smallest payment across the menu).
    std::vector<std::pair<std::string, double>> slacks;
    bool pass = false;
    double tolerance = 0.0;

    double slack(const std::string& name) const;
};

// What a solver hands back: the menu, its expected payment under the plan,
// which constraint families bind at the optimum, and (once the verifier has
// run) a certificate.
struct SolveReport {
    Menu menu;
    double objective = 0.0;
    std::vector<std::pair<std::string, bool>> binding;
    std::optional<Certificate> certificate;
    bool trivial = false;
    std::string note;
};

}  // namespace menuforge

#endif
