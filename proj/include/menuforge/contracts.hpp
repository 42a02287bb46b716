#ifndef MENUFORGE_CONTRACTS_HPP
#define MENUFORGE_CONTRACTS_HPP

#include <string>
#include <vector>

#include "menuforge/geometry.hpp"
#include "menuforge/report.hpp"

namespace menuforge {

// Hidden-action environment: the agent privately picks an action a with cost
// c_a, inducing outcome distribution p_a. The principal wants the target
// action played at minimum expected payment.
class ContractInstance {
  public:
    ContractInstance(OutcomeSpace outcomes,
                     std::vector<std::string> actions,
                     std::vector<Belief> beliefs,
                     std::vector<double> costs,
                     std::size_t target);

    const OutcomeSpace& outcomes() const { return outcomes_; }
    std::size_t outcome_count() const { return outcomes_.size(); }
    std::size_t action_count() const { return actions_.size(); }
    const std::vector<std::string>& actions() const { return actions_; }
    const Belief& belief(std::size_t a) const { return beliefs_[a]; }
    double cost(std::size_t a) const { return costs_[a]; }
    const std::vector<double>& costs() const { return costs_; }
    std::size_t target() const { return target_; }

    // Embedding as a general instance: a single uninformative signal "_"
    // with zero acquisition cost. The canonical plan assigns the target.
    ProblemInstance to_problem() const;
    Plan canonical_plan() const;

  private:
    OutcomeSpace outcomes_;
    std::vector<std::string> actions_;
    std::vector<Belief> beliefs_;
    std::vector<double> costs_;
    std::size_t target_;
};

// Convexified cost curve: cheapest mixture of actions reproducing belief p.
// Throws HullError when p is not a mixture of the action beliefs.
double cost_curve_eval(const ContractInstance& inst, const Belief& p);

// Elicitability means the target sits on the lower boundary of the cost
// curve: c(p_target) == c_target within 1e-7 * (1 + c_target). Results whose
// gap lands within a factor of ten of that threshold are flagged marginal.
struct ElicitabilityCheck {
    bool elicitable = false;
    bool marginal = false;
    double curve_value = 0.0;
    double gap = 0.0;  // c_target - c(p_target), >= 0 up to float noise
};

ElicitabilityCheck check_elicitability(const ContractInstance& inst);
bool is_elicitable(const ContractInstance& inst);

// A single optimal contract plus the limited-liability shift applied to it.
struct ContractSolution {
    Contract contract;
    double beta = 0.0;       // uniform shift above the incentive-optimal subtangent
    double objective = 0.0;  // expected payment under the target's belief
    std::vector<double> subgradient;  // slope used, normalized to min 0
};

// Minimum expected payment implementing the target action: maximize the
// worst-coordinate advantage of a cost-curve subtangent at the target, then
// shift up by beta = max(0, -(c_target + advantage)) to restore limited
// liability. Throws NotElicitableError when the target is not elicitable.
ContractSolution optimal_contract(const ContractInstance& inst);

// Menu built from the optimal contract plus every candidate that keeps the
// menu optimal: candidate t' is retained iff its mean payment minus beta
// stays weakly below the cost curve at every action belief and t' clears
// limited liability.
Menu enumerate_optimal_menu(const ContractInstance& inst, const std::vector<Contract>& candidates);

// Strict elicitability: the target is a vertex of the lower cost envelope,
// i.e. no mixture of the *other* actions reproduces its belief at cost <=
// c_target.
bool is_strictly_elicitable(const ContractInstance& inst);

// Slope separating the target from every other action with a positive
// margin, found by maximizing that margin over a box |v| <= B,
// B = 1 + 10 * (cost range + 1). Returned slope is normalized so its
// smallest coordinate is zero.
struct StrictSubgradient {
    std::vector<double> slope;
    double margin = 0.0;
};

StrictSubgradient strict_subgradient(const ContractInstance& inst);

// Contract making every non-target action strictly worse for the agent while
// paying at most epsilon above the weak optimum: blend the optimal contract
// with the strict-subgradient contract, weight min(1/2, epsilon / (beta2 -
// beta1)).
ContractSolution strict_epsilon_optimal(const ContractInstance& inst, double epsilon);

// Candidates for enumerate_optimal_menu: one subtangent of the cost curve
// anchored at each action belief, shifted by the optimal beta.
std::vector<Contract> default_menu_candidates(const ContractInstance& inst);

}  // namespace menuforge

#endif
