#ifndef MENUFORGE_IA_HPP
#define MENUFORGE_IA_HPP

#include <string>
#include <vector>

#include "menuforge/geometry.hpp"
#include "menuforge/report.hpp"

namespace menuforge {

// Pure information-acquisition environment: the agent observes a signal
// realization sigma ~ q at cost kappa and reports; the induced posterior is
// p_sigma. The prior (the signal's mean posterior) must have full support.
class IAInstance {
  public:
    IAInstance(OutcomeSpace outcomes,
               std::vector<std::string> signals,
               std::vector<double> q,
               std::vector<Belief> posteriors,
               double kappa);

    const OutcomeSpace& outcomes() const { return outcomes_; }
    std::size_t outcome_count() const { return outcomes_.size(); }
    std::size_t signal_count() const { return signals_.size(); }
    const std::vector<std::string>& signals() const { return signals_; }
    const std::vector<double>& q() const { return q_; }
    const Belief& posterior(std::size_t s) const { return posteriors_[s]; }
    double kappa() const { return kappa_; }
    const Belief& prior() const { return prior_; }

    // Embedding as a general instance: one zero-cost action whose
    // conditionals are the posteriors. The canonical plan acquires and takes
    // that action on every realization.
    ProblemInstance to_problem() const;
    Plan canonical_plan() const;

  private:
    OutcomeSpace outcomes_;
    std::vector<std::string> signals_;
    std::vector<double> q_;
    std::vector<Belief> posteriors_;
    double kappa_;
    Belief prior_;
};

// True iff kappa > 0 and some posterior differs from the prior by more than
// tolerance in some coordinate. Otherwise the only optimum is trivial.
bool check_nontrivial(const IAInstance& inst);

// The minimal normalized menu: pieces h_omega(p) = p(omega) / prior(omega),
// one per outcome, all meeting at the prior with value 1. Designations map
// each simplex corner to its piece.
Menu base_cone(const Belief& prior);

// E_{sigma ~ q} of the base cone at the posteriors. Exceeds 1 exactly when
// the signal moves the posterior at all.
double value_of_information(const IAInstance& inst);

// Closed-form minimum-payment menu: the base cone scaled by
// alpha = kappa / (value_of_information - 1). The report's objective is
// alpha * value_of_information, the incentive constraint is tight, and every
// contract is a scaled indicator. kappa == 0 yields the zero menu flagged
// trivial; an uninformative signal with kappa > 0 raises NotElicitableError
// ("cannot incentivize").
SolveReport solve_ia(const IAInstance& inst);

// Normalize a feasible menu so the incentive constraint holds with the
// acquisition cost rescaled to 1: G / (E G(p_sigma) - kappa). Requires a
// positive denominator.
Menu phi(const Menu& menu, const IAInstance& inst);

// Inverse transform: kappa * Gbar / (E Gbar(p_sigma) - 1). Requires the
// expectation to exceed 1.
Menu phi_inverse(const Menu& normalized, const IAInstance& inst);

}  // namespace menuforge

#endif
