#pragma once

// Synthesis drivers tying the pieces together: compile a bounded program
// space, solve it (internal search or an external planner), decode the plan
// back to a program and verify it with the interpreter on training and
// held-out instances; plus the divide-and-conquer pipeline that first
// synthesizes subtask procedures and then a main program calling them.

#include <optional>
#include <string>
#include <vector>

#include "genplan/compile.hpp"
#include "genplan/domains.hpp"
#include "genplan/model.hpp"
#include "genplan/planner.hpp"
#include "genplan/program.hpp"

namespace genplan {

// Re-resolves a program's action/fluent/variable references by name against
// another core (e.g. held-out instances with larger value ranges).
PlanningProgram rebind_program(const PlanningProgram& prog,
                               const ProblemCore& from, const ProblemCore& to);

enum class SynthStatus {
    Solved,             // program found and verified
    Limit,              // planner hit a limit
    Unsolvable,         // compiled task proven unsolvable
    VerificationFailed, // decoded program fails an instance: compilation bug
};

struct SynthRequest {
    GeneralizedProblem gp;
    std::optional<GeneralizedProblem> holdout;
    CompilationConfig cfg;
    std::vector<ProcedureDef> dck; // auxiliary procedures to inject
    SearchLimits limits;
    ExecLimits run_limits;
    std::string planner_cmd; // empty: internal greedy search
    double planner_timeout = 600.0;
    bool use_bfs = false;
};

struct SynthOutcome {
    SynthStatus status = SynthStatus::Limit;
    PlanningProgram program; // valid when Solved
    Plan plan;
    SearchStats stats;
    std::string detail;
    int used_lines = 0; // index of the last programmed main line
};

SynthOutcome synthesize(const SynthRequest& req);

// Solution kinds as reported in benchmark tables.
enum class SolutionKind { OP, NP, R, RP, ME };
const char* to_string(SolutionKind k);
SolutionKind classify_program(const PlanningProgram& prog);

struct BenchRow {
    std::string procedure;
    int lines = 0;
    int instances = 0;
    double seconds = 0.0;
    int plan_length = -1;
    std::string note;
};

struct BenchReport {
    SolutionKind kind = SolutionKind::ME;
    std::vector<BenchRow> rows;
    std::string render() const;
};

struct PipelineRequest {
    DomainRecipe recipe; // subtask suite must be present
    int main_lines = 4;
    std::optional<int> subtask_lines; // default: per-subtask suggestion
    // goto conditions offered while synthesizing main (default: domain pool)
    std::optional<std::vector<FluentId>> main_condition_pool;
    int stack = 2;
    bool split = true;
    SearchLimits limits;
    SearchLimits main_limits; // may differ (the hard part)
    ExecLimits run_limits;
    std::string planner_cmd;
    double planner_timeout = 600.0;
    bool concurrent_subtasks = true;
};

struct PipelineOutcome {
    bool solved = false;
    SynthStatus status = SynthStatus::Limit;
    std::string failed_stage; // subtask name or "main" when not solved
    PlanningProgram program;  // full program (main + procedures)
    BenchReport report;
};

PipelineOutcome run_pipeline(const PipelineRequest& req);

} // namespace genplan
