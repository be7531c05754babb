#pragma once

// Grounded PDDL emission (zero-arity predicates, parameter-free actions,
// conditional effects), a parser for exactly that subset, plan-file parsing,
// and a subprocess adapter for driving an external planner.

#include <map>
#include <string>
#include <vector>

#include "genplan/model.hpp"

namespace genplan {

struct PddlPair {
    std::string domain_text;
    std::string problem_text;
    // emitted (sanitized) name -> original name
    std::map<std::string, std::string> fluent_names;
    std::map<std::string, std::string> action_names;
};

// Lowercases, squeezes every run of other characters to '_', trims edge
// underscores. Idempotent.
std::string sanitize_pddl_name(const std::string& name);

// Throws NameCollisionError when two fluents or two actions sanitize to the
// same identifier.
PddlPair emit_pddl(const ClassicalProblem& p);

// Parses text previously produced by emit_pddl (a fresh core is built in
// file order, so emit(parse(emit(p))) is byte-identical to emit(p)).
ClassicalProblem parse_pddl(const std::string& domain_text,
                            const std::string& problem_text);

// One "(action-name)" per line; blank lines and ';' comments are skipped and
// names are lowercased. Throws ParseError for anything else.
std::vector<std::string> parse_plan_file(const std::string& text);

struct PlannerCommand {
    // must contain {domain}, {problem} and {plan}
    std::string command_template;
    double timeout_seconds = 600.0;
    std::string workdir; // empty: inherit
};

struct ExternalResult {
    enum class Kind { Ok, Timeout, NonzeroExit, PlanInvalid };
    Kind kind = Kind::NonzeroExit;
    Plan plan;          // valid when kind == Ok (original action names)
    int exit_code = 0;
    std::string detail; // captured output / validation reason
};

// Writes the task to fresh temp files (honouring GENPLAN_TMPDIR), runs the
// command, parses the plan file and validates the plan before returning it.
ExternalResult solve_external(const ClassicalProblem& p,
                              const PlannerCommand& cmd);

} // namespace genplan
