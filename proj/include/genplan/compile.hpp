#pragma once

// Compilation of program synthesis into classical planning. A compiled task
// simultaneously programs instruction lines and simulates their execution:
// each instruction has a programming action P(w) applicable on an empty line
// (writing the instruction and executing it) and a repeat action R(w)
// applicable once the line is programmed. Procedure calls run on a bounded
// stack of level-replicated fluents; conditional gotos are emitted whole or
// split into evaluate/jump pairs; solving a multi-instance problem threads
// the instances through the main end action, which resets the state to the
// next initial state and records per-instance goal markers.

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "genplan/model.hpp"
#include "genplan/program.hpp"

namespace genplan {

struct CompilationConfig {
    int lines = 3;  // n: program lines per procedure (trailing end sits at n)
    int procs = 0;  // b: auxiliary procedures
    int stack = 1;  // m: stack bound
    bool split = true;          // eval/jmp goto split
    bool one_level_only = false; // calls only from main, m must be 2
    // per-procedure line bounds overriding `lines` (index 0 = main); lets a
    // short main be synthesized next to longer injected procedures
    std::vector<int> proc_lines;
    std::vector<FluentId> condition_pool;       // programmable goto conditions
    std::vector<FluentId> extra_condition_pool; // executable-only (injected DCK)
    std::vector<ProcSignature> signatures;      // [0]=main; defaults if empty

    void validate(const ProblemCore& core) const;
    // condition_pool followed by extra entries not already present
    std::vector<FluentId> executable_conditions() const;
    int line_bound(int proc) const {
        return proc_lines.empty() ? lines : proc_lines.at(std::size_t(proc));
    }
};

enum class CompiledActionKind { Program, Repeat, Call, End, Eval, Jmp };

struct DecodeEntry {
    CompiledActionKind kind = CompiledActionKind::Program;
    int line = -1;
    int proc = 0;
    int level = 1;
    std::optional<Instruction> payload; // what the line holds (Program/Repeat)
};

enum class FluentNs {
    Base, Stacked, Pc, Proc, Top, InsNil, InsAct, InsGoto, InsCond, InsTgt,
    InsCall, InsEnd, Acc, Eval, Test, GoalOk, Done,
};

struct FluentTag {
    FluentNs ns = FluentNs::Base;
    int line = -1;
    int proc = -1;
    int level = -1;
    int aux = -1;         // test/goal index, goto target
    std::string payload;  // base fluent / action / call signature text
};

struct CompiledTask {
    ClassicalProblem task;
    std::unordered_map<std::string, DecodeEntry> decode;
    std::vector<FluentTag> fluent_tags; // aligned with task fluent ids
    CompilationConfig config;
    CorePtr source;                     // fluent/action table being compiled
    bool flat = false;
    // DCK lines merged into decode results; [proc][line]
    std::vector<std::vector<std::optional<Instruction>>> injected;

    long goto_machinery_count() const;
    std::string render_tag(const FluentTag& tag) const;
};

// The single-procedure compilation: F ∪ pc ∪ ins ∪ {done}, programming and
// repeat actions per line, goto machinery per `split`. Throws BadConfigError
// for n < 1 or an empty condition pool.
CompiledTask compile_flat(const GeneralizedProblem& gp, int n,
                          const std::vector<FluentId>& condition_pool,
                          bool split);

// The stack compilation with procedures, nested/recursive calls and
// parameter copying.
CompiledTask compile_nested(const GeneralizedProblem& gp,
                            const CompilationConfig& cfg);

// Programs auxiliary procedure lines into the initial state; aux[q] becomes
// procedure q+1. Lines after a procedure's last instruction are closed with
// end markers. Never adds or removes actions.
CompiledTask inject_dck(const CompiledTask& task,
                        const std::vector<ProcedureDef>& aux);

// Injects every procedure including main, leaving nothing to program; the
// resulting task is solvable by execution actions alone.
CompiledTask inject_full_program(const CompiledTask& task,
                                 const PlanningProgram& prog);

// Maps a plan's programming actions (plus injected lines) back to the
// program it wrote. Throws Error if two programming actions target one line.
PlanningProgram decode_plan(const Plan& plan, const CompiledTask& task);

} // namespace genplan
