#pragma once

// Shared test support: tiny problem builders, a reference flat interpreter
// (independent of the stack interpreter), and a seeded program generator.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "genplan/model.hpp"
#include "genplan/program.hpp"

namespace genplan::testsupport {

// Deterministic RNG (xorshift*), independent of the standard library details.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : s_(seed ? seed : 0x9e3779b9ull) {}
    std::uint64_t next() {
        s_ ^= s_ >> 12;
        s_ ^= s_ << 25;
        s_ ^= s_ >> 27;
        return s_ * 0x2545f4914f6cdd1dull;
    }
    int below(int n) { return int(next() % std::uint64_t(n)); }
    bool flip() { return next() & 1; }

private:
    std::uint64_t s_;
};

struct MiniCore {
    std::shared_ptr<ProblemCore> core;
    std::map<std::string, FluentId> fl;

    FluentId operator[](const std::string& name) const { return fl.at(name); }
};

inline MiniCore mini_core(const std::vector<std::string>& fluents) {
    MiniCore mc;
    mc.core = std::make_shared<ProblemCore>();
    for (const std::string& f : fluents) mc.fl[f] = mc.core->fluents.add(f);
    return mc;
}

inline Action mk_action(const std::string& name, const LiteralSet& pre,
                        std::vector<ConditionalEffect> effects) {
    Action a;
    a.name = name;
    a.precondition = pre;
    a.effects = std::move(effects);
    return a;
}

inline State mk_state(const ProblemCore& core,
                      const std::vector<FluentId>& true_fluents) {
    State s(core.fluents.size());
    for (FluentId f : true_fluents) s.set(f, true);
    return s;
}

// -- Reference flat interpreter ------------------------------------------------
//
// Independent oracle for programs without procedure calls: program counter
// over main's lines, failure on revisiting a (state, pc) pair, exactly the
// flat execution semantics.

struct FlatResult {
    enum class Status { Solved, LoopFail, ErrorFail } status;
    State final_state;
    long steps = 0;
};

inline FlatResult run_flat_reference(const PlanningProgram& prog,
                                     const ClassicalProblem& p,
                                     long max_steps = 100000) {
    const ProcedureDef& main = prog.procs.at(0);
    State s = p.initial;
    int pc = 0;
    std::set<std::pair<std::vector<std::uint64_t>, int>> seen;
    seen.insert({s.words(), pc});
    FlatResult res{FlatResult::Status::ErrorFail, s, 0};
    while (res.steps < max_steps) {
        if (pc < 0 || pc >= int(main.lines.size()) ||
            !main.lines[std::size_t(pc)]) {
            res.status = FlatResult::Status::ErrorFail;
            res.final_state = s;
            return res;
        }
        const Instruction& ins = *main.lines[std::size_t(pc)];
        ++res.steps;
        if (ins.kind == Instruction::Kind::End) {
            res.status = FlatResult::Status::Solved;
            res.final_state = s;
            return res;
        }
        if (ins.kind == Instruction::Kind::Act) {
            const Action& a = p.core->actions[std::size_t(ins.action)];
            if (!applicable(s, a)) {
                res.status = FlatResult::Status::ErrorFail;
                res.final_state = s;
                return res;
            }
            try {
                s = apply(s, a);
            } catch (const ConflictingEffectsError&) {
                res.status = FlatResult::Status::ErrorFail;
                return res;
            }
            pc += 1;
        } else if (ins.kind == Instruction::Kind::Goto) {
            pc = s.test(ins.condition) ? pc + 1 : ins.target;
        } else {
            res.status = FlatResult::Status::ErrorFail;
            return res;
        }
        if (!seen.insert({s.words(), pc}).second) {
            res.status = FlatResult::Status::LoopFail;
            res.final_state = s;
            return res;
        }
    }
    res.status = FlatResult::Status::LoopFail; // budget; treated as failure
    return res;
}

// Random flat program over the given pools; every program ends with end.
inline PlanningProgram random_flat_program(Rng& rng, int max_lines,
                                           const std::vector<int>& actions,
                                           const std::vector<FluentId>& conds) {
    int end_line = 1 + rng.below(max_lines);
    PlanningProgram prog;
    prog.procs.emplace_back();
    prog.procs[0].name = "main";
    auto& lines = prog.procs[0].lines;
    for (int i = 0; i < end_line; ++i) {
        bool use_goto = !conds.empty() && rng.flip();
        if (use_goto) {
            int target = rng.below(end_line + 1);
            if (target == i) target = end_line;
            FluentId f = conds[std::size_t(rng.below(int(conds.size())))];
            lines.emplace_back(Instruction::jump(target, f));
        } else {
            lines.emplace_back(
                Instruction::act(actions[std::size_t(rng.below(int(actions.size())))]));
        }
    }
    lines.emplace_back(Instruction::end());
    return prog;
}

} // namespace genplan::testsupport
