#include <doctest.h>

#include <cmath>
#include <vector>

#include "menuforge/contracts.hpp"
#include "menuforge/errors.hpp"
#include "menuforge/geometry.hpp"
#include "menuforge/numeric.hpp"
#include "menuforge/verify.hpp"
#include "support/generators.hpp"
#include "support/rng.hpp"

using namespace menuforge;

namespace {

// Three actions: two revealing extremes and an expensive middle one.
ContractInstance three_action(std::size_t target) {
    return ContractInstance(OutcomeSpace({"w0", "w1"}), {"a1", "a2", "a3"},
                            {Belief({1.0, 0.0}), Belief({0.0, 1.0}), Belief({0.5, 0.5})},
                            {0.0, 1.0, 0.8}, target);
}

ContractInstance two_action(std::size_t target) {
    return ContractInstance(OutcomeSpace({"w0", "w1"}), {"a1", "a2"},
                            {Belief({1.0, 0.0}), Belief({0.0, 1.0})}, {0.0, 1.0}, target);
}

ContractInstance same_cost_pair(std::size_t target) {
    return ContractInstance(OutcomeSpace({"w0", "w1"}), {"a1", "a2"},
                            {Belief({0.5, 0.5}), Belief({0.9, 0.1})}, {0.0, 0.0}, target);
}

}  // namespace

TEST_CASE("cost curve mixes actions and rejects points outside the hull") {
    ContractInstance inst = three_action(2);
    CHECK(cost_curve_eval(inst, Belief({0.5, 0.5})) == doctest::Approx(0.5));
    CHECK(cost_curve_eval(inst, Belief({1.0, 0.0})) == doctest::Approx(0.0));
    CHECK(cost_curve_eval(inst, Belief({0.0, 1.0})) == doctest::Approx(1.0));

    ContractInstance narrow(OutcomeSpace({"w0", "w1"}), {"a1", "a2"},
                            {Belief({1.0, 0.0}), Belief({0.5, 0.5})}, {0.0, 0.0}, 0);
    CHECK_THROWS_AS(cost_curve_eval(narrow, Belief({0.0, 1.0})), HullError);
}

TEST_CASE("elicitability separates boundary from interior cost points") {
    ElicitabilityCheck bad = check_elicitability(three_action(2));
    CHECK_FALSE(bad.elicitable);
    CHECK(bad.curve_value == doctest::Approx(0.5));
    CHECK(bad.gap == doctest::Approx(0.3));

    CHECK(is_elicitable(three_action(1)));
    CHECK(is_elicitable(three_action(0)));

    ContractInstance solo(OutcomeSpace({"w0", "w1"}), {"only"}, {Belief({0.7, 0.3})}, {0.4}, 0);
    CHECK(is_elicitable(solo));
}

TEST_CASE("near-threshold gaps are flagged marginal") {
    // Gap of 3e-7 on unit cost scale: outside the 2e-7 acceptance threshold
    // but within a factor of ten of it.
    ContractInstance close(OutcomeSpace({"w0", "w1"}), {"a1", "a2", "a3"},
                           {Belief({1.0, 0.0}), Belief({0.0, 1.0}), Belief({0.5, 0.5})},
                           {0.0, 1.0, 0.5 + 3e-7}, 2);
    ElicitabilityCheck check = check_elicitability(close);
    CHECK_FALSE(check.elicitable);
    CHECK(check.marginal);
    ElicitabilityCheck far = check_elicitability(three_action(2));
    CHECK_FALSE(far.marginal);
}

TEST_CASE("optimal contract on the two-action extreme instance") {
    ContractSolution sol = optimal_contract(two_action(1));
    CHECK(sol.objective == doctest::Approx(1.0));
    CHECK(sol.beta == doctest::Approx(0.0));
    CHECK(sol.contract[0] == doctest::Approx(0.0));
    CHECK(sol.contract[1] == doctest::Approx(1.0));
}

TEST_CASE("optimal contract can be free when beliefs overlap costlessly") {
    ContractSolution sol = optimal_contract(same_cost_pair(1));
    CHECK(sol.objective == doctest::Approx(0.0));
    CHECK(sol.beta == doctest::Approx(0.0));
    CHECK(sol.contract[0] == doctest::Approx(0.0));
    CHECK(sol.contract[1] == doctest::Approx(0.0));
}

TEST_CASE("single zero-cost action pays nothing") {
    ContractInstance solo(OutcomeSpace({"w0", "w1"}), {"only"}, {Belief({0.7, 0.3})}, {0.0}, 0);
    ContractSolution sol = optimal_contract(solo);
    CHECK(sol.objective == doctest::Approx(0.0));
    CHECK(sol.contract[0] == doctest::Approx(0.0));
    CHECK(sol.contract[1] == doctest::Approx(0.0));
}

TEST_CASE("non-elicitable target raises a typed error naming the cause") {
    try {
        optimal_contract(three_action(2));
        FAIL("expected NotElicitableError");
    } catch (const NotElicitableError& e) {
        CHECK(std::string(e.what()).find("not on lower boundary") != std::string::npos);
    }
}

TEST_CASE("optimal contracts verify against the embedding") {
    testsupport::Rng rng(5);
    for (int trial = 0; trial < 25; ++trial) {
        ContractInstance inst = testsupport::random_elicitable_contract(rng);
        ContractSolution sol = optimal_contract(inst);
        Menu menu;
        menu.pieces.push_back(AffinePiece::from_contract(sol.contract));
        Certificate cert = verify_menu(menu, inst.to_problem(), inst.canonical_plan());
        CHECK(cert.pass);
        // Normalized slope reporting: smallest coordinate is zero.
        double lo = sol.subgradient[0];
        for (double v : sol.subgradient) lo = std::min(lo, v);
        CHECK(lo == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("menu enumeration keeps safe candidates and drops unsafe ones") {
    ContractInstance inst = two_action(1);

    SUBCASE("no candidates gives the singleton optimum") {
        Menu menu = enumerate_optimal_menu(inst, {});
        REQUIRE(menu.pieces.size() == 1);
        CHECK(menu_eval(menu, inst.belief(1)) == doctest::Approx(1.0));
    }

    SUBCASE("a constant contract above the curve at a1 is rejected") {
        // (0.5, 0.5) pays 0.5 at p_a1 where the curve is 0: keeping it would
        // let the agent collect 0.5 for the free action, breaking incentives.
        Menu menu = enumerate_optimal_menu(inst, {Contract({0.5, 0.5})});
        CHECK(menu.pieces.size() == 1);
    }

    SUBCASE("a candidate below the curve everywhere is retained") {
        Menu menu = enumerate_optimal_menu(inst, {Contract({0.0, 0.5})});
        REQUIRE(menu.pieces.size() == 2);
        CHECK(menu_eval(menu, inst.belief(1)) == doctest::Approx(1.0));
        Certificate cert = verify_menu(menu, inst.to_problem(), inst.canonical_plan());
        CHECK(cert.pass);
    }

    SUBCASE("limited-liability violators are rejected") {
        Menu menu = enumerate_optimal_menu(inst, {Contract({-0.1, 2.0})});
        CHECK(menu.pieces.size() == 1);
    }
}

TEST_CASE("default candidates keep the menu optimal and verified") {
    testsupport::Rng rng(17);
    for (int trial = 0; trial < 15; ++trial) {
        ContractInstance inst = testsupport::random_elicitable_contract(rng);
        ContractSolution base = optimal_contract(inst);
        Menu menu = enumerate_optimal_menu(inst, default_menu_candidates(inst));
        CHECK(menu.pieces.size() >= 1);
        CHECK(menu_eval(menu, inst.belief(inst.target())) ==
              doctest::Approx(base.objective).epsilon(1e-7));
        Certificate cert = verify_menu(menu, inst.to_problem(), inst.canonical_plan());
        CHECK(cert.pass);

        // Shifted-subtangent sandwich: the envelope minus beta stays below
        // the cost curve at every action belief and touches it at the target.
        for (std::size_t a = 0; a < inst.action_count(); ++a) {
            double g = menu_eval(menu, inst.belief(a)) - base.beta;
            double c = cost_curve_eval(inst, inst.belief(a));
            CHECK(g <= c + 1e-8);
        }
        double at_target = menu_eval(menu, inst.belief(inst.target())) - base.beta;
        CHECK(at_target == doctest::Approx(inst.cost(inst.target())).epsilon(1e-8));
    }
}

TEST_CASE("strict elicitability needs an unreachable-or-expensive belief") {
    CHECK(is_strictly_elicitable(same_cost_pair(1)));

    // A duplicate belief at equal cost destroys strictness but not weak
    // elicitability.
    ContractInstance dup(OutcomeSpace({"w0", "w1"}), {"a1", "a2", "a2x"},
                         {Belief({0.5, 0.5}), Belief({0.9, 0.1}), Belief({0.9, 0.1})},
                         {0.0, 0.0, 0.0}, 1);
    CHECK(is_elicitable(dup));
    CHECK_FALSE(is_strictly_elicitable(dup));
    CHECK_THROWS_AS(strict_subgradient(dup), NotElicitableError);

    CHECK_FALSE(is_strictly_elicitable(three_action(2)));  // not even weakly

    ContractInstance solo(OutcomeSpace({"w0", "w1"}), {"only"}, {Belief({0.7, 0.3})}, {0.4}, 0);
    CHECK(is_strictly_elicitable(solo));
}

TEST_CASE("strict subgradient separates with a positive margin") {
    StrictSubgradient sg = strict_subgradient(same_cost_pair(1));
    CHECK(sg.margin > kDefaultVerifyTol);
    // Separation direction: higher payment where the target is likelier.
    CHECK(sg.slope[0] > sg.slope[1]);
    double lo = std::min(sg.slope[0], sg.slope[1]);
    CHECK(lo == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("strict epsilon-optimal contract on the worked instance") {
    ContractSolution sol = strict_epsilon_optimal(same_cost_pair(1), 0.09);
    CHECK(sol.contract[0] == doctest::Approx(0.1));
    CHECK(sol.contract[1] == doctest::Approx(0.0));
    CHECK(sol.objective == doctest::Approx(0.09));

    // Strict: the other action's utility is strictly below the target's.
    ContractInstance inst = same_cost_pair(1);
    double u_target = expected_payment(sol.contract, inst.belief(1)) - inst.cost(1);
    double u_other = expected_payment(sol.contract, inst.belief(0)) - inst.cost(0);
    CHECK(u_target > u_other + 1e-10);

    CHECK_THROWS_AS(strict_epsilon_optimal(inst, 0.0), PreconditionError);
    CHECK_THROWS_AS(strict_epsilon_optimal(inst, -1.0), PreconditionError);
}

TEST_CASE("strict contracts stay within epsilon across random instances") {
    testsupport::Rng rng(29);
    for (int trial = 0; trial < 15; ++trial) {
        ContractInstance inst = testsupport::random_strict_contract(rng);
        ContractSolution weak = optimal_contract(inst);
        double eps = 1e-3;
        ContractSolution strict = strict_epsilon_optimal(inst, eps);
        CHECK(strict.objective <= weak.objective + eps + 1e-9);
        double u_target =
            expected_payment(strict.contract, inst.belief(inst.target())) -
            inst.cost(inst.target());
        for (std::size_t a = 0; a < inst.action_count(); ++a) {
            if (a == inst.target()) continue;
            double u = expected_payment(strict.contract, inst.belief(a)) - inst.cost(a);
            CHECK(u_target > u + 1e-10);
        }
        for (std::size_t w = 0; w < inst.outcome_count(); ++w)
            CHECK(strict.contract[w] >= -1e-12);
    }
}

TEST_CASE("cost curve probe accepts valid instances deterministically") {
    ContractInstance inst = three_action(1);
    ProbeResult first = cost_curve_property_probe(inst, 200, 1);
    ProbeResult second = cost_curve_property_probe(inst, 200, 1);
    CHECK(first.pass);
    CHECK(first.trials == 200);
    CHECK(first.worst_violation == second.worst_violation);  // bitwise determinism
}
