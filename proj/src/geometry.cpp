#include "menuforge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "menuforge/errors.hpp"
#include "menuforge/numeric.hpp"

namespace menuforge {

OutcomeSpace::OutcomeSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 2)
        throw ValidationError("outcome space needs at least two outcomes, got " +
                              std::to_string(labels_.size()));
    std::set<std::string> seen;
    for (const auto& l : labels_) {
        if (l.empty()) throw ValidationError("outcome labels must be non-empty");
        if (!seen.insert(l).second) throw ValidationError("duplicate outcome label '" + l + "'");
    }
}

int OutcomeSpace::index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    return it == labels_.end() ? -1 : static_cast<int>(it - labels_.begin());
}

Belief::Belief(std::vector<double> weights) : w_(std::move(weights)) {
    if (w_.empty()) throw ValidationError("belief must have at least one weight");
    double sum = 0.0;
    for (double& x : w_) {
        if (!std::isfinite(x)) throw ValidationError("belief weight is not finite");
        if (x < 0.0) {
            if (x < -1e-12) throw ValidationError("belief weight " + std::to_string(x) + " < 0");
            x = 0.0;
        }
        sum += x;
    }
    if (std::fabs(sum - 1.0) > kAbsTol)
        throw ValidationError("belief weights sum to " + std::to_string(sum) + ", expected 1");
}

Contract::Contract(std::vector<double> payments) : t_(std::move(payments)) {
    if (t_.empty()) throw ValidationError("contract must have at least one payment");
    for (double x : t_)
        if (!std::isfinite(x)) throw ValidationError("contract payment is not finite");
}

double AffinePiece::eval(const Belief& p) const {
    if (p.size() != slope.size())
        throw DimensionError("piece/belief dimension mismatch", slope.size(), p.size());
    return dot(slope, p.weights()) - intercept;
}

Contract AffinePiece::to_contract() const {
    std::vector<double> t(slope.size());
    for (std::size_t i = 0; i < slope.size(); ++i) t[i] = slope[i] - intercept;
    return Contract(std::move(t));
}

AffinePiece AffinePiece::from_contract(const Contract& t) {
    return AffinePiece{t.payments(), 0.0};
}

bool Menu::designations_consistent(double tol) const {
    for (const auto& d : designations) {
        if (d.piece >= pieces.size()) return false;
        double g = menu_eval(*this, d.anchor);
        if (pieces[d.piece].eval(d.anchor) < g - tol) return false;
    }
    return true;
}

int Plan::blind_action() const {
    if (action_by_signal.empty()) throw ValidationError("plan has no action assignment");
    int a = action_by_signal.front();
    for (int b : action_by_signal)
        if (b != a) throw ValidationError("no-acquire plan assigns more than one action");
    return a;
}

ProblemInstance::ProblemInstance(OutcomeSpace outcomes,
                                 std::vector<std::string> signals,
                                 std::vector<std::string> actions,
                                 std::vector<double> signal_prior,
                                 std::vector<std::vector<Belief>> conditionals,
                                 std::vector<double> action_costs,
                                 double acquisition_cost)
    : outcomes_(std::move(outcomes)),
      signals_(std::move(signals)),
      actions_(std::move(actions)),
      q_(std::move(signal_prior)),
      conditionals_(std::move(conditionals)),
      costs_(std::move(action_costs)),
      kappa_(acquisition_cost) {
    if (signals_.empty()) throw ValidationError("instance needs at least one signal realization");
    if (actions_.empty()) throw ValidationError("instance needs at least one action");
    std::set<std::string> seen(signals_.begin(), signals_.end());
    if (seen.size() != signals_.size()) throw ValidationError("duplicate signal label");
    seen = std::set<std::string>(actions_.begin(), actions_.end());
    if (seen.size() != actions_.size()) throw ValidationError("duplicate action label");

    if (q_.size() != signals_.size())
        throw DimensionError("signal prior size", signals_.size(), q_.size());
    double qsum = 0.0;
    for (double x : q_) {
        if (!std::isfinite(x) || x < -1e-12)
            throw ValidationError("signal probability must be non-negative");
        qsum += std::max(x, 0.0);
    }
    if (std::fabs(qsum - 1.0) > kAbsTol)
        throw ValidationError("signal prior sums to " + std::to_string(qsum) + ", expected 1");

    if (conditionals_.size() != actions_.size())
        throw DimensionError("conditional table rows", actions_.size(), conditionals_.size());
    for (const auto& row : conditionals_) {
        if (row.size() != signals_.size())
            throw DimensionError("conditional table columns", signals_.size(), row.size());
        for (const auto& b : row)
            if (b.size() != outcomes_.size())
                throw DimensionError("conditional belief dimension", outcomes_.size(), b.size());
    }

    if (costs_.size() != actions_.size())
        throw DimensionError("action cost count", actions_.size(), costs_.size());
    for (double c : costs_)
        if (!std::isfinite(c) || c < 0.0)
            throw ValidationError("action costs must be finite and non-negative");
    if (!std::isfinite(kappa_) || kappa_ < 0.0)
        throw ValidationError("acquisition cost must be finite and non-negative");

    marginals_.reserve(actions_.size());
    for (std::size_t a = 0; a < actions_.size(); ++a) {
        std::vector<double> m(outcomes_.size(), 0.0);
        for (std::size_t s = 0; s < signals_.size(); ++s)
            for (std::size_t w = 0; w < outcomes_.size(); ++w)
                m[w] += q_[s] * conditionals_[a][s][w];
        // Renormalize away accumulated float error so the Belief ctor's sum
        // check never trips on valid inputs.
        double sum = 0.0;
        for (double x : m) sum += x;
        for (double& x : m) x /= sum;
        marginals_.emplace_back(std::move(m));
    }
}

void ProblemInstance::validate_plan(const Plan& plan) const {
    if (plan.action_by_signal.size() != signals_.size())
        throw DimensionError("plan assignment size", signals_.size(), plan.action_by_signal.size());
    for (int a : plan.action_by_signal)
        if (a < 0 || static_cast<std::size_t>(a) >= actions_.size())
            throw ValidationError("plan references unknown action index " + std::to_string(a));
    if (!plan.acquire) plan.blind_action();  // throws unless constant
}

double expected_payment(const Contract& t, const Belief& p) {
    if (t.size() != p.size())
        throw DimensionError("contract/belief dimension mismatch", t.size(), p.size());
    return dot(t.payments(), p.weights());
}

double menu_eval(const Menu& menu, const Belief& p) {
    if (menu.pieces.empty()) throw PreconditionError("menu_eval on empty menu");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& piece : menu.pieces) best = std::max(best, piece.eval(p));
    return best;
}

std::vector<std::size_t> best_response_contract(const Menu& menu, const Belief& p) {
    double g = menu_eval(menu, p);
    double tol = kAbsTol + kRelTol * std::fabs(g);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < menu.pieces.size(); ++i)
        if (menu.pieces[i].eval(p) >= g - tol) out.push_back(i);
    return out;
}

double min_payment(const Menu& menu, std::size_t outcome) {
    if (menu.pieces.empty()) throw PreconditionError("min_payment on empty menu");
    if (outcome >= menu.outcome_count())
        throw DimensionError("outcome index", menu.outcome_count(), outcome);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& piece : menu.pieces)
        best = std::min(best, piece.slope[outcome] - piece.intercept);
    return best;
}

PriorDecomposition prior_decomposition(const Belief& p, const Belief& prior) {
    if (p.size() != prior.size())
        throw DimensionError("belief dimension mismatch", prior.size(), p.size());
    for (std::size_t w = 0; w < prior.size(); ++w)
        if (prior[w] <= 0.0)
            throw PreconditionError("prior lacks full support at index " + std::to_string(w) +
                                    "; reduce the outcome space first");

    std::size_t omega = 0;
    double best_ratio = -1.0;
    for (std::size_t w = 0; w < p.size(); ++w) {
        double r = p[w] / prior[w];
        if (r > best_ratio + kAbsTol) {
            best_ratio = r;
            omega = w;
        }
    }
    double beta = prior[omega] / p[omega];
    PriorDecomposition d;
    d.outcome = omega;
    d.beta = beta;
    d.corner_weights.assign(p.size(), 0.0);
    for (std::size_t w = 0; w < p.size(); ++w) {
        if (w == omega) continue;
        // Non-negative because omega maximizes p/prior; clamp float dust.
        d.corner_weights[w] = std::max(0.0, prior[w] - beta * p[w]);
    }
    return d;
}

}  // namespace menuforge
