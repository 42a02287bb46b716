#ifndef MENUFORGE_LP_HPP
#define MENUFORGE_LP_HPP

#include <optional>
#include <vector>

namespace menuforge {

enum class LpDirection { Minimize, Maximize };
enum class LpRelation { LessEq, Equal, GreaterEq };
enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpConstraint {
    std::vector<double> coeffs;
    LpRelation relation = LpRelation::LessEq;
    double rhs = 0.0;
};

// Per-variable bounds; a default-constructed LpBounds means free.
struct LpBounds {
    std::optional<double> lower;
    std::optional<double> upper;
};

struct LinearProgram {
    LpDirection direction = LpDirection::Minimize;
    std::vector<double> objective;
    std::vector<LpConstraint> constraints;
    // Either empty (all variables free) or one entry per variable.
    std::vector<LpBounds> bounds;

    std::size_t variable_count() const { return objective.size(); }
};

struct LpOutcome {
    LpStatus status = LpStatus::Infeasible;
    double value = 0.0;               // meaningful only when Optimal
    std::vector<double> solution;     // original variable space; empty unless Optimal
};

// Dense two-phase simplex. Deterministic: identical inputs give identical
// outputs. Dantzig pricing with an automatic permanent switch to Bland's
// rule after a streak of degenerate pivots, so cycling cannot occur.
LpOutcome solve_lp(const LinearProgram& lp);

}  // namespace menuforge

#endif
