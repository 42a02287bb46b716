#ifndef MENUFORGE_GEOMETRY_HPP
#define MENUFORGE_GEOMETRY_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace menuforge {

// Finite set of outcome labels. At least two, unique, non-empty.
class OutcomeSpace {
  public:
    explicit OutcomeSpace(std::vector<std::string> labels);

    std::size_t size() const { return labels_.size(); }
    const std::string& label(std::size_t i) const { return labels_[i]; }
    const std::vector<std::string>& labels() const { return labels_; }
    // Index of a label, or -1 if absent.
    int index_of(const std::string& label) const;

  private:
    std::vector<std::string> labels_;
};

// Point on the probability simplex over outcomes. Weights are validated on
// construction: non-negative (tiny negative float noise is clamped to zero)
// and summing to one within 1e-9.
class Belief {
  public:
    explicit Belief(std::vector<double> weights);

    std::size_t size() const { return w_.size(); }
    double operator[](std::size_t i) const { return w_[i]; }
    const std::vector<double>& weights() const { return w_; }

    bool operator==(const Belief& other) const { return w_ == other.w_; }

  private:
    std::vector<double> w_;
};

// Payment per outcome. Entries must be finite; negative entries are legal
// here (limited liability is a property checked on menus, not a type
// invariant).
class Contract {
  public:
    explicit Contract(std::vector<double> payments);

    std::size_t size() const { return t_.size(); }
    double operator[](std::size_t i) const { return t_[i]; }
    const std::vector<double>& payments() const { return t_; }

  private:
    std::vector<double> t_;
};

// Affine function of a belief, h(p) = slope . p - intercept. A contract t
// induces the piece with slope t and intercept 0, and conversely a piece's
// payments are its values at the simplex corners.
struct AffinePiece {
    std::vector<double> slope;
    double intercept = 0.0;

    double eval(const Belief& p) const;
    Contract to_contract() const;
    static AffinePiece from_contract(const Contract& t);
};

// Piecewise-linear convex menu: G(p) = max over pieces. Carries a
// designated-subtangent map recording, for each anchor belief a solver cares
// about, which piece attains the max there.
struct Menu {
    struct Designation {
        Belief anchor;
        std::size_t piece;
    };

    std::vector<AffinePiece> pieces;
    std::vector<Designation> designations;

    std::size_t outcome_count() const { return pieces.empty() ? 0 : pieces.front().slope.size(); }
    // True iff every designation's piece attains the menu maximum at its
    // anchor within tolerance.
    bool designations_consistent(double tol) const;
};

// Agent's contingent plan: whether to acquire the signal, and the action
// taken on each signal realization. For acquire == false every entry of
// action_by_signal must name the same action (the one taken blind).
struct Plan {
    bool acquire = true;
    std::vector<int> action_by_signal;

    int blind_action() const;  // the common action of a no-acquire plan
};

// Principal-agent environment: outcomes, signal realizations with prior q,
// actions with costs, conditional outcome distributions p_{a,sigma}, and the
// signal's acquisition cost kappa. Marginals p_a = sum_sigma q(sigma)
// p_{a,sigma} are precomputed.
class ProblemInstance {
  public:
    ProblemInstance(OutcomeSpace outcomes,
                    std::vector<std::string> signals,
                    std::vector<std::string> actions,
                    std::vector<double> signal_prior,
                    std::vector<std::vector<Belief>> conditionals,
                    std::vector<double> action_costs,
                    double acquisition_cost);

    const OutcomeSpace& outcomes() const { return outcomes_; }
    std::size_t outcome_count() const { return outcomes_.size(); }
    std::size_t signal_count() const { return signals_.size(); }
    std::size_t action_count() const { return actions_.size(); }
    const std::vector<std::string>& signals() const { return signals_; }
    const std::vector<std::string>& actions() const { return actions_; }
    const std::vector<double>& q() const { return q_; }
    double kappa() const { return kappa_; }
    double cost(std::size_t action) const { return costs_[action]; }
    const std::vector<double>& costs() const { return costs_; }
    const Belief& conditional(std::size_t action, std::size_t signal) const {
        return conditionals_[action][signal];
    }
    const Belief& marginal(std::size_t action) const { return marginals_[action]; }

    void validate_plan(const Plan& plan) const;

  private:
    OutcomeSpace outcomes_;
    std::vector<std::string> signals_;
    std::vector<std::string> actions_;
    std::vector<double> q_;
    std::vector<std::vector<Belief>> conditionals_;
    std::vector<double> costs_;
    double kappa_;
    std::vector<Belief> marginals_;
};

// Expected payment of a contract under a belief.
double expected_payment(const Contract& t, const Belief& p);

// G(p): the menu's upper envelope. Errors on an empty menu.
double menu_eval(const Menu& menu, const Belief& p);

// Indices of all pieces attaining the envelope at p within tolerance,
// ascending.
std::vector<std::size_t> best_response_contract(const Menu& menu, const Belief& p);

// M_G(omega): cheapest payment at the outcome across the menu's contracts.
// Limited liability holds iff this is >= 0 for every outcome.
double min_payment(const Menu& menu, std::size_t outcome);

// Decomposition of a full-support prior as p0 = beta p + sum_omega'
// beta_omega' delta_omega', all coefficients non-negative, beta > 0, taking
// omega = argmax p(omega') / p0(omega') (lowest index on ties).
struct PriorDecomposition {
    std::size_t outcome;                 // the omega defining beta
    double beta;                         // weight on p
    std::vector<double> corner_weights;  // beta_omega', zero at .outcome
};

PriorDecomposition prior_decomposition(const Belief& p, const Belief& prior);

}  // namespace menuforge

#endif
