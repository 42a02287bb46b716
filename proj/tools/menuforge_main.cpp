#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "menuforge/contracts.hpp"
#include "menuforge/errors.hpp"
#include "menuforge/general.hpp"
#include "menuforge/geometry.hpp"
#include "menuforge/ia.hpp"
#include "menuforge/io.hpp"
#include "menuforge/numeric.hpp"
#include "menuforge/plot.hpp"
#include "menuforge/verify.hpp"

namespace {

using namespace menuforge;

double resolve_tolerance(bool flag_given, double flag_value) {
    if (flag_given) {
        if (!(flag_value > 0.0) || !std::isfinite(flag_value))
            throw PreconditionError("--tol must be a positive number");
        return flag_value;
    }
    if (const char* env = std::getenv("MENUFORGE_TOL")) {
        char* end = nullptr;
        double v = std::strtod(env, &end);
        if (end == env || *end != '\0' || !std::isfinite(v) || v <= 0.0)
            throw PreconditionError(std::string("MENUFORGE_TOL is not a positive number: '") +
                                    env + "'");
        return v;
    }
    return kDefaultVerifyTol;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
}

void print_warnings(const ParsedInstance& parsed) {
    for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << "\n";
}

// Which constraint families are tight for a hidden-action menu: incentive
// when some non-target action ties the target's utility, participation when
// the target's utility is zero, limited liability when some outcome's
// cheapest payment is zero.
std::vector<std::pair<std::string, bool>> contract_binding(const ContractInstance& inst,
                                                           const Menu& menu) {
    double u_target =
        menu_eval(menu, inst.belief(inst.target())) - inst.cost(inst.target());
    bool incentive = false;
    for (std::size_t a = 0; a < inst.action_count(); ++a) {
        if (a == inst.target()) continue;
        double u = menu_eval(menu, inst.belief(a)) - inst.cost(a);
        incentive = incentive || std::fabs(u - u_target) <= kDefaultVerifyTol;
    }
    bool participation = std::fabs(u_target) <= kDefaultVerifyTol;
    bool liability = false;
    for (std::size_t w = 0; w < inst.outcome_count(); ++w)
        liability = liability || std::fabs(min_payment(menu, w)) <= kDefaultVerifyTol;
    return {{"incentive", incentive},
            {"participation", participation},
            {"limited_liability", liability}};
}

SolveReport solve_general_report(const ProblemInstance& problem,
                                 const Plan& plan,
                                 const std::string& formulation) {
    if (!plan.acquire)
        throw PreconditionError(
            "solving needs a plan with acquire = true; for a blind plan drop the "
            "signals and solve the hidden-action form");
    GeneralSolution sol = formulation == "p5" ? solve_general_p5(problem, plan)
                                              : solve_general_p6(problem, plan);
    if (sol.status == GeneralStatus::NotElicitable)
        throw NotElicitableError("the plan admits no incentive-compatible menu");
    SolveReport report;
    report.menu = sol.menu;
    report.objective = sol.objective;
    report.binding = sol.binding;
    return report;
}

SolveReport solve_parsed(const ParsedInstance& parsed,
                         const std::string& regime,
                         bool epsilon_given,
                         double epsilon,
                         const std::string& formulation) {
    if (regime == "ia" && parsed.regime != Regime::InformationAcquisition)
        throw PreconditionError(
            "--regime ia needs a single zero-cost action and a signals field");
    if (regime == "contract" && parsed.regime != Regime::Contract)
        throw PreconditionError(
            "--regime contract needs a signal-free instance with a target plan");
    if (regime == "general" && parsed.regime != Regime::General) {
        if (epsilon_given)
            throw PreconditionError("--epsilon applies only to the hidden-action regime");
        return solve_general_report(parsed.embedding(), parsed.verification_plan(), formulation);
    }

    SolveReport report;
    switch (parsed.regime) {
        case Regime::InformationAcquisition:
            if (epsilon_given)
                throw PreconditionError("--epsilon applies only to the hidden-action regime");
            report = solve_ia(*parsed.ia);
            break;
        case Regime::Contract: {
            const ContractInstance& inst = *parsed.contract;
            if (epsilon_given) {
                ContractSolution sol = strict_epsilon_optimal(inst, epsilon);
                report.menu.pieces.push_back(AffinePiece::from_contract(sol.contract));
                report.menu.designations.push_back({inst.belief(inst.target()), 0});
                report.objective = sol.objective;
                report.note = "single contract with every other action strictly worse";
            } else {
                report.menu = enumerate_optimal_menu(inst, default_menu_candidates(inst));
                report.objective = menu_eval(report.menu, inst.belief(inst.target()));
            }
            report.binding = contract_binding(inst, report.menu);
            break;
        }
        case Regime::General:
            if (epsilon_given)
                throw PreconditionError("--epsilon applies only to the hidden-action regime");
            report = solve_general_report(*parsed.general, *parsed.plan, formulation);
            break;
    }
    return report;
}

int run_solve(const std::string& instance_path,
              const std::string& out_path,
              const std::string& plot_path,
              const std::string& regime,
              bool tol_given,
              double tol_flag,
              bool epsilon_given,
              double epsilon,
              const std::string& formulation) {
    double tol = resolve_tolerance(tol_given, tol_flag);
    ParsedInstance parsed = load_instance_file(instance_path);
    print_warnings(parsed);

    SolveReport report = solve_parsed(parsed, regime, epsilon_given, epsilon, formulation);
    ProblemInstance problem = parsed.embedding();
    report.certificate = verify_menu(report.menu, problem, parsed.verification_plan(), tol);

    if (!plot_path.empty()) write_file(plot_path, render_plot_svg(problem, report.menu));
    emit(out_path, report_to_json(report, problem));
    return report.certificate->pass ? 0 : 2;
}

int run_verify(const std::string& instance_path,
               const std::string& menu_path,
               const std::string& out_path,
               bool tol_given,
               double tol_flag) {
    double tol = resolve_tolerance(tol_given, tol_flag);
    ParsedInstance parsed = load_instance_file(instance_path);
    print_warnings(parsed);

    ProblemInstance problem = parsed.embedding();
    Menu menu = menu_from_json_file(menu_path);
    if (menu.outcome_count() != problem.outcome_count())
        throw DimensionError("menu outcome count", problem.outcome_count(),
                             menu.outcome_count());

    Certificate cert = verify_menu(menu, problem, parsed.verification_plan(), tol);
    emit(out_path, "{\n  \"certificate\": " + certificate_to_json(cert, problem) + "\n}\n");
    return cert.pass ? 0 : 2;
}

int run_plot(const std::string& instance_path,
             const std::string& menu_path,
             const std::string& out_path) {
    ParsedInstance parsed = load_instance_file(instance_path);
    print_warnings(parsed);
    Menu menu = menu_from_json_file(menu_path);
    emit(out_path, render_plot_svg(parsed.embedding(), menu));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimum-payment menus for agents with hidden information or hidden actions"};
    app.require_subcommand(1);

    std::string instance_path, menu_path, out_path, plot_path;
    std::string formulation = "p6";
    std::string regime = "auto";
    double tol_flag = kDefaultVerifyTol;
    double epsilon = 0.0;

    CLI::App* solve = app.add_subcommand("solve", "Compute an optimal menu and certify it");
    solve->add_option("instance", instance_path, "instance JSON file")->required();
    solve->add_option("--regime", regime, "force a solver instead of auto-detecting")
        ->check(CLI::IsMember({"auto", "ia", "contract", "general"}));
    CLI::Option* solve_tol =
        solve->add_option("--tol", tol_flag, "verification tolerance (default 1e-7)");
    CLI::Option* solve_eps = solve->add_option(
        "--epsilon", epsilon,
        "hidden-action regime: pay up to this much extra for strict incentives");
    solve->add_option("--formulation", formulation, "general-regime LP layout")
        ->check(CLI::IsMember({"p5", "p6"}));
    solve->add_option("--plot", plot_path, "also write an SVG of the menu (two outcomes only)");
    solve->add_option("-o,--output", out_path, "write the report here instead of stdout");

    CLI::App* verify = app.add_subcommand("verify", "Check a menu against an instance's plan");
    verify->add_option("instance", instance_path, "instance JSON file")->required();
    verify->add_option("menu", menu_path, "menu JSON file (a report or a bare contract array)")
        ->required();
    CLI::Option* verify_tol =
        verify->add_option("--tol", tol_flag, "verification tolerance (default 1e-7)");
    verify->add_option("-o,--output", out_path, "write the certificate here instead of stdout");

    CLI::App* plot = app.add_subcommand("plot", "Render an instance and menu as SVG");
    plot->add_option("instance", instance_path, "instance JSON file")->required();
    plot->add_option("menu", menu_path, "menu JSON file")->required();
    plot->add_option("-o,--output", out_path, "SVG output path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (solve->parsed())
            return run_solve(instance_path, out_path, plot_path, regime,
                             solve_tol->count() > 0, tol_flag, solve_eps->count() > 0, epsilon,
                             formulation);
        if (verify->parsed())
            return run_verify(instance_path, menu_path, out_path, verify_tol->count() > 0,
                              tol_flag);
        return run_plot(instance_path, menu_path, out_path);
    } catch (const NotElicitableError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::cout << error_report_json(e.what());
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::cout << error_report_json(e.what());
        return 1;
    }
}
