#ifndef TESTS_SUPPORT_GENERATORS_HPP
#define TESTS_SUPPORT_GENERATORS_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "menuforge/contracts.hpp"
#include "menuforge/geometry.hpp"
#include "menuforge/ia.hpp"
#include "support/rng.hpp"

namespace testsupport {

inline std::vector<std::string> labels(const char* stem, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(stem + std::to_string(i));
    return out;
}

// Nontrivial instance: kappa > 0 and at least one posterior away from the
// prior. Random posteriors virtually never collapse onto the prior, but the
// loop makes the guarantee unconditional.
inline menuforge::IAInstance random_ia_instance(Rng& rng) {
    using namespace menuforge;
    for (;;) {
        std::size_t n = static_cast<std::size_t>(rng.pick(2, 4));
        std::size_t s = static_cast<std::size_t>(rng.pick(2, 5));
        std::vector<double> q = random_distribution(rng, s, 0.05);
        std::vector<Belief> posteriors;
        for (std::size_t i = 0; i < s; ++i) posteriors.push_back(random_belief(rng, n, 1e-3));
        double kappa = rng.uniform(0.01, 2.0);
        IAInstance inst(OutcomeSpace(labels("w", n)), labels("s", s), q, posteriors, kappa);
        if (check_nontrivial(inst)) return inst;
    }
}

// Half the draws target the cheapest action, which sits on the lower cost
// boundary by construction; the other half take whatever random target turns
// out elicitable, so non-vertex-but-on-boundary targets also appear.
inline menuforge::ContractInstance random_elicitable_contract(Rng& rng) {
    using namespace menuforge;
    for (;;) {
        std::size_t n = static_cast<std::size_t>(rng.pick(2, 3));
        std::size_t k = static_cast<std::size_t>(rng.pick(2, 5));
        std::vector<Belief> beliefs;
        std::vector<double> costs;
        for (std::size_t a = 0; a < k; ++a) {
            beliefs.push_back(random_belief(rng, n, 0.01));
            costs.push_back(rng.uniform(0.0, 1.0));
        }
        std::size_t target;
        if (rng.pick(0, 1) == 0) {
            target = static_cast<std::size_t>(
                std::min_element(costs.begin(), costs.end()) - costs.begin());
        } else {
            target = static_cast<std::size_t>(rng.pick(0, static_cast<int>(k) - 1));
        }
        ContractInstance inst(OutcomeSpace(labels("w", n)), labels("a", k), beliefs, costs,
                              target);
        if (is_elicitable(inst)) return inst;
    }
}

// Arbitrary instance, elicitable or not, for characterization tests.
inline menuforge::ContractInstance random_contract_instance(Rng& rng) {
    using namespace menuforge;
    std::size_t n = static_cast<std::size_t>(rng.pick(2, 3));
    std::size_t k = static_cast<std::size_t>(rng.pick(2, 5));
    std::vector<Belief> beliefs;
    std::vector<double> costs;
    for (std::size_t a = 0; a < k; ++a) {
        beliefs.push_back(random_belief(rng, n, 0.01));
        costs.push_back(rng.uniform(0.0, 1.0));
    }
    std::size_t target = static_cast<std::size_t>(rng.pick(0, static_cast<int>(k) - 1));
    return ContractInstance(OutcomeSpace(labels("w", n)), labels("a", k), beliefs, costs, target);
}

// Strictly elicitable: half the draws give the target a strictly lowest
// cost (no other mixture can match it), half rejection-sample.
inline menuforge::ContractInstance random_strict_contract(Rng& rng) {
    using namespace menuforge;
    for (;;) {
        std::size_t n = static_cast<std::size_t>(rng.pick(2, 3));
        std::size_t k = static_cast<std::size_t>(rng.pick(2, 4));
        std::vector<Belief> beliefs;
        std::vector<double> costs;
        for (std::size_t a = 0; a < k; ++a) {
            beliefs.push_back(random_belief(rng, n, 0.01));
            costs.push_back(rng.uniform(0.2, 1.0));
        }
        std::size_t target = static_cast<std::size_t>(rng.pick(0, static_cast<int>(k) - 1));
        if (rng.pick(0, 1) == 0) costs[target] = rng.uniform(0.0, 0.1);
        ContractInstance inst(OutcomeSpace(labels("w", n)), labels("a", k), beliefs, costs,
                              target);
        if (is_strictly_elicitable(inst)) return inst;
    }
}

struct GeneralDraw {
    menuforge::ProblemInstance instance;
    menuforge::Plan plan;
};

// Candidate general instance whose plan passes the conditional-cost-curve
// precheck by construction: every action used by the plan carries the same
// lowest cost, so the pure action is always a cheapest mixture. Whether the
// full LP is feasible is up to the caller to test.
inline GeneralDraw random_general_candidate(Rng& rng) {
    using namespace menuforge;
    std::size_t n = static_cast<std::size_t>(rng.pick(2, 4));
    std::size_t s = static_cast<std::size_t>(rng.pick(2, 4));
    std::size_t k = static_cast<std::size_t>(rng.pick(2, 4));

    std::vector<std::vector<Belief>> conditionals(k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t sig = 0; sig < s; ++sig)
            conditionals[a].push_back(random_belief(rng, n, 0.01));

    Plan plan;
    plan.acquire = true;
    std::vector<bool> used(k, false);
    for (std::size_t sig = 0; sig < s; ++sig) {
        int a = rng.pick(0, static_cast<int>(k) - 1);
        plan.action_by_signal.push_back(a);
        used[static_cast<std::size_t>(a)] = true;
    }

    double base_cost = rng.uniform(0.0, 0.3);
    std::vector<double> costs(k);
    for (std::size_t a = 0; a < k; ++a)
        costs[a] = used[a] ? base_cost : base_cost + rng.uniform(0.0, 0.5);

    ProblemInstance inst(OutcomeSpace(labels("w", n)), labels("s", s), labels("a", k),
                         random_distribution(rng, s, 0.05), conditionals, costs,
                         rng.uniform(0.005, 0.2));
    return {std::move(inst), std::move(plan)};
}

}  // namespace testsupport

#endif
