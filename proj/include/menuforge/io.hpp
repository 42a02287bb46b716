#ifndef MENUFORGE_IO_HPP
#define MENUFORGE_IO_HPP

#include <optional>
#include <string>
#include <vector>

#include "menuforge/contracts.hpp"
#include "menuforge/errors.hpp"
#include "menuforge/geometry.hpp"
#include "menuforge/ia.hpp"
#include "menuforge/report.hpp"

namespace menuforge {

// Instance file violates the schema; carries a JSON-pointer-style path to
// the offending element.
struct SchemaError : Error {
    std::string pointer;
    SchemaError(std::string json_pointer, const std::string& message)
        : Error(json_pointer + ": " + message), pointer(std::move(json_pointer)) {}
};

enum class Regime { InformationAcquisition, Contract, General };

// An instance file after validation, regime detection, and (for the
// information-acquisition regime) removal of zero-probability signals and
// zero-mass outcomes.
struct ParsedInstance {
    Regime regime = Regime::General;
    std::optional<IAInstance> ia;
    std::optional<ContractInstance> contract;
    std::optional<ProblemInstance> general;
    std::optional<Plan> plan;  // as given in the file
    bool had_signals_field = true;
    std::vector<std::string> warnings;

    // General-problem view of whichever regime is engaged, plus the plan the
    // verifier should check it against.
    ProblemInstance embedding() const;
    Plan verification_plan() const;
};

ParsedInstance load_instance_text(const std::string& text);
ParsedInstance load_instance_file(const std::string& path);

// Canonical rendering; load(serialize(x)) reproduces x semantically.
std::string serialize_instance(const ParsedInstance& parsed);

// Accepts either a solver report ({"menu": [...], ...}) or a bare array of
// {"payments": [...]} objects.
Menu menu_from_json_text(const std::string& text);
Menu menu_from_json_file(const std::string& path);

// Numbers in emitted JSON carry 12 significant digits.
std::string format_number(double x);

std::string report_to_json(const SolveReport& report, const ProblemInstance& inst);
std::string certificate_to_json(const Certificate& cert, const ProblemInstance& inst);
std::string error_report_json(const std::string& reason);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace menuforge

#endif
