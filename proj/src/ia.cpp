#include "menuforge/ia.hpp"

#include <cmath>

#include "menuforge/errors.hpp"
#include "menuforge/numeric.hpp"

namespace menuforge {
namespace {

Belief mean_posterior(const OutcomeSpace& outcomes,
                      const std::vector<std::string>& signals,
                      const std::vector<double>& q,
                      const std::vector<Belief>& posteriors) {
    if (posteriors.empty()) throw ValidationError("instance needs at least one signal");
    if (signals.size() != posteriors.size())
        throw DimensionError("signal label count", posteriors.size(), signals.size());
    if (q.size() != posteriors.size())
        throw DimensionError("signal distribution size", posteriors.size(), q.size());
    for (const auto& p : posteriors)
        if (p.size() != outcomes.size())
            throw DimensionError("posterior dimension", outcomes.size(), p.size());
    double qsum = 0.0;
    for (double x : q) {
        if (!std::isfinite(x) || x < -1e-12)
            throw ValidationError("signal probability must be non-negative");
        qsum += std::max(x, 0.0);
    }
    if (std::fabs(qsum - 1.0) > kAbsTol)
        throw ValidationError("signal distribution sums to " + std::to_string(qsum) +
                              ", expected 1");
    std::vector<double> m(posteriors.front().size(), 0.0);
    for (std::size_t s = 0; s < q.size(); ++s)
        for (std::size_t w = 0; w < m.size(); ++w) m[w] += q[s] * posteriors[s][w];
    double sum = 0.0;
    for (double x : m) sum += x;
    for (double& x : m) x /= sum;
    return Belief(std::move(m));
}

Menu scaled(const Menu& menu, double factor) {
    Menu out = menu;
    for (auto& piece : out.pieces) {
        for (double& s : piece.slope) s *= factor;
        piece.intercept *= factor;
    }
    return out;
}

}  // namespace

IAInstance::IAInstance(OutcomeSpace outcomes,
                       std::vector<std::string> signals,
                       std::vector<double> q,
                       std::vector<Belief> posteriors,
                       double kappa)
    : outcomes_(std::move(outcomes)),
      signals_(std::move(signals)),
      q_(std::move(q)),
      posteriors_(std::move(posteriors)),
      kappa_(kappa),
      prior_(mean_posterior(outcomes_, signals_, q_, posteriors_)) {
    if (!std::isfinite(kappa_) || kappa_ < 0.0)
        throw ValidationError("acquisition cost must be finite and non-negative");
    for (std::size_t w = 0; w < prior_.size(); ++w)
        if (prior_[w] <= 0.0)
            throw PreconditionError("prior has zero mass on outcome '" + outcomes_.label(w) +
                                    "'; reduce the outcome space first");
}

ProblemInstance IAInstance::to_problem() const {
    std::vector<std::vector<Belief>> conditionals{posteriors_};
    return ProblemInstance(outcomes_, signals_, {"report"}, q_, std::move(conditionals), {0.0},
                           kappa_);
}

Plan IAInstance::canonical_plan() const {
    Plan plan;
    plan.acquire = true;
    plan.action_by_signal.assign(signals_.size(), 0);
    return plan;
}

bool check_nontrivial(const IAInstance& inst) {
    if (inst.kappa() <= 0.0) return false;
    for (std::size_t s = 0; s < inst.signal_count(); ++s)
        for (std::size_t w = 0; w < inst.outcome_count(); ++w)
            if (std::fabs(inst.posterior(s)[w] - inst.prior()[w]) > kAbsTol) return true;
    return false;
}

Menu base_cone(const Belief& prior) {
    const std::size_t n = prior.size();
    Menu menu;
    menu.pieces.reserve(n);
    for (std::size_t w = 0; w < n; ++w) {
        if (prior[w] <= 0.0)
            throw PreconditionError("prior has zero mass at index " + std::to_string(w) +
                                    "; reduce the outcome space first");
        AffinePiece piece;
        piece.slope.assign(n, 0.0);
        piece.slope[w] = 1.0 / prior[w];
        piece.intercept = 0.0;
        menu.pieces.push_back(std::move(piece));
    }
    for (std::size_t w = 0; w < n; ++w) {
        std::vector<double> corner(n, 0.0);
        corner[w] = 1.0;
        menu.designations.push_back({Belief(std::move(corner)), w});
    }
    return menu;
}

double value_of_information(const IAInstance& inst) {
    Menu cone = base_cone(inst.prior());
    double e = 0.0;
    for (std::size_t s = 0; s < inst.signal_count(); ++s)
        e += inst.q()[s] * menu_eval(cone, inst.posterior(s));
    return e;
}

SolveReport solve_ia(const IAInstance& inst) {
    SolveReport report;
    if (inst.kappa() <= 0.0) {
        // Watching the signal is free, so the zero menu already induces
        // (weak) acquisition. Report it rather than erroring.
        AffinePiece zero;
        zero.slope.assign(inst.outcome_count(), 0.0);
        report.menu.pieces.push_back(std::move(zero));
        report.menu.designations.push_back({inst.prior(), 0});
        report.objective = 0.0;
        report.trivial = true;
        report.note = "acquisition cost is zero; the zero menu is optimal";
        report.binding = {{"incentive", true}, {"participation", true}, {"limited_liability", true}};
        return report;
    }
    if (!check_nontrivial(inst))
        throw NotElicitableError(
            "cannot incentivize: every posterior equals the prior, so no menu makes "
            "acquisition worthwhile");

    double voi = value_of_information(inst);
    if (voi - 1.0 <= kAbsTol)
        throw NotElicitableError("cannot incentivize: the signal carries no usable information");
    double alpha = inst.kappa() / (voi - 1.0);

    Menu cone = base_cone(inst.prior());
    report.menu = scaled(cone, alpha);
    // Designate the attaining piece at each posterior as well as the corners.
    for (std::size_t s = 0; s < inst.signal_count(); ++s) {
        auto best = best_response_contract(report.menu, inst.posterior(s));
        report.menu.designations.push_back({inst.posterior(s), best.front()});
    }
    report.objective = alpha * voi;
    double plan_utility = report.objective - inst.kappa();
    report.binding = {{"incentive", true},
                      {"participation", std::fabs(plan_utility) <= kAbsTol},
                      {"limited_liability", true}};
    return report;
}

namespace {

double menu_expectation(const Menu& menu, const IAInstance& inst) {
    double e = 0.0;
    for (std::size_t s = 0; s < inst.signal_count(); ++s)
        e += inst.q()[s] * menu_eval(menu, inst.posterior(s));
    return e;
}

}  // namespace

Menu phi(const Menu& menu, const IAInstance& inst) {
    double denom = menu_expectation(menu, inst) - inst.kappa();
    if (denom <= kAbsTol)
        throw PreconditionError("normalization requires E G(p_sigma) - kappa > 0, got " +
                                std::to_string(denom));
    return scaled(menu, 1.0 / denom);
}

Menu phi_inverse(const Menu& normalized, const IAInstance& inst) {
    double denom = menu_expectation(normalized, inst) - 1.0;
    if (denom <= kAbsTol)
        throw PreconditionError("denormalization requires E Gbar(p_sigma) > 1, got 1 + " +
                                std::to_string(denom));
    return scaled(normalized, inst.kappa() / denom);
}

}  // namespace menuforge
