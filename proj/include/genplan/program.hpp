#pragma once

// Planning programs: numbered instruction lists with conditional gotos,
// nested/recursive procedure calls and value-copied parameters, plus the
// interpreter that executes them against a classical problem.
//
// Execution keeps a bounded call stack. Fluents in the problem's stackable
// set K live in per-level replicas; everything else is global. A conditional
// goto jumps when its condition fluent is false.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "genplan/model.hpp"

namespace genplan {

struct Instruction {
    enum class Kind { Act, Goto, Call, End };
    Kind kind = Kind::End;

    int action = -1;                 // Act: index into core.actions
    int target = -1;                 // Goto: line index
    FluentId condition = kNoFluent;  // Goto
    int callee = -1;                 // Call: procedure id
    std::vector<int> args;           // Call: indices into core.variables

    static Instruction act(int action_index);
    static Instruction jump(int target, FluentId condition);
    static Instruction call(int callee, std::vector<int> args = {});
    static Instruction end();

    friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct ProcedureDef {
    std::string name;               // procs[0] is always "main"
    std::vector<ProcParam> params;  // empty for main
    std::vector<std::optional<Instruction>> lines; // nullopt = unprogrammed
};

struct PlanningProgram {
    std::vector<ProcedureDef> procs;

    const ProcedureDef& main() const { return procs.at(0); }
    int proc_index(std::string_view name) const;
    // Largest instruction-line index used by any procedure (the trailing end
    // of a full procedure sits at this index).
    int line_span() const;
};

// Structural checks: dense ids, main parameterless, goto targets in range,
// end not on line 0, call arities/domains matching. Throws Error.
void check_program(const PlanningProgram& prog, const ProblemCore& core);

struct ExecLimits {
    int max_depth = 8;            // m: stack bound
    long max_steps = 1'000'000;   // safety net beyond the loop check
    bool record_trace = false;
};

enum class RunStatus {
    Terminated,
    FailedLoop,
    FailedDepth,
    FailedBudget,
    FailedError,
};

const char* to_string(RunStatus s);

struct TraceStep {
    int level = 0;
    int proc = 0;
    int pc = 0;
    std::string text; // rendered instruction
};

struct RunOutcome {
    RunStatus status = RunStatus::FailedError;
    std::string detail;
    long steps = 0;
    // Base fluents with each K-member reporting its level-1 replica; only
    // meaningful when status == Terminated.
    State final_state;
    std::vector<TraceStep> trace;

    bool terminated() const { return status == RunStatus::Terminated; }
};

RunOutcome run_program(const PlanningProgram& prog, const ClassicalProblem& p,
                       const ExecLimits& limits);

// Stepwise access to one execution: each step() call performs the
// instruction under the top frame's program counter.
class ProgramStepper {
public:
    ProgramStepper(const PlanningProgram& prog, const ClassicalProblem& p,
                   const ExecLimits& limits);
    ~ProgramStepper();
    ProgramStepper(ProgramStepper&&) noexcept;

    // empty while the run continues; the final status once it ends
    std::optional<RunStatus> step();

    int level() const; // stack depth, 1-based
    int proc() const;  // procedure of the top frame
    int pc() const;    // its program counter
    // fluent value resolved at the active level (K-members read their
    // replica, everything else the global)
    bool holds(FluentId f) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct InstanceReport {
    RunStatus status;
    bool goal_holds = false;
    long steps = 0;
    bool solved() const { return status == RunStatus::Terminated && goal_holds; }
};

struct SolveReport {
    std::vector<InstanceReport> instances;
    bool solved = true; // conjunction over instances; true when empty
};

SolveReport solves(const PlanningProgram& prog, const GeneralizedProblem& gp,
                   const ExecLimits& limits);

// -- Textual program format --------------------------------------------------
//
//   proc main {
//     0. call p1(x)
//     1. end
//   }
//   proc p1(aux: axis) {
//     0. dec_aux
//     1. goto(0, !(aux_eq_0))
//     2. end
//   }
//
// Line numbers are mandatory and dense; goto conditions use !(fluent) only;
// '#' starts a comment. A call may be written `call p1(x)` or `p1(x)`.

PlanningProgram parse_program(const std::string& text, const ProblemCore& core);
std::string format_program(const PlanningProgram& prog, const ProblemCore& core);
std::string format_instruction(const Instruction& ins, const ProblemCore& core,
                               const PlanningProgram* prog = nullptr);

} // namespace genplan
