#include "genplan/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <future>
#include <sstream>

#include "genplan/pddl.hpp"

namespace genplan {

PlanningProgram rebind_program(const PlanningProgram& prog,
                               const ProblemCore& from, const ProblemCore& to) {
    auto map_var = [&](int v) {
        const std::string& name = from.variables[std::size_t(v)].name;
        int out = to.variable_index(name);
        if (out < 0) throw Error("variable " + name + " missing in target");
        return out;
    };
    PlanningProgram out;
    for (const ProcedureDef& p : prog.procs) {
        ProcedureDef def;
        def.name = p.name;
        for (const ProcParam& par : p.params)
            def.params.push_back({par.domain, map_var(par.fixed_var)});
        for (const auto& line : p.lines) {
            if (!line) {
                def.lines.push_back(std::nullopt);
                continue;
            }
            Instruction ins = *line;
            switch (ins.kind) {
            case Instruction::Kind::Act: {
                const std::string& name =
                    from.actions[std::size_t(ins.action)].name;
                int a = to.action_index(name);
                if (a < 0) throw Error("action " + name + " missing in target");
                ins.action = a;
                break;
            }
            case Instruction::Kind::Goto:
                ins.condition = to.fluents.require(
                    from.fluents.name(ins.condition));
                break;
            case Instruction::Kind::Call:
                for (int& v : ins.args) v = map_var(v);
                break;
            case Instruction::Kind::End:
                break;
            }
            def.lines.push_back(ins);
        }
        out.procs.push_back(std::move(def));
    }
    return out;
}

namespace {

// conditions used by goto instructions of injected procedures
std::vector<FluentId> dck_conditions(const std::vector<ProcedureDef>& dck) {
    std::vector<FluentId> out;
    for (const ProcedureDef& p : dck)
        for (const auto& line : p.lines)
            if (line && line->kind == Instruction::Kind::Goto)
                if (std::find(out.begin(), out.end(), line->condition) ==
                    out.end())
                    out.push_back(line->condition);
    return out;
}

int last_programmed_line(const ProcedureDef& p) {
    int last = 0;
    for (std::size_t i = 0; i < p.lines.size(); ++i)
        if (p.lines[i]) last = int(i);
    return last;
}

} // namespace

SynthOutcome synthesize(const SynthRequest& req) {
    SynthOutcome out;

    CompilationConfig cfg = req.cfg;
    for (FluentId f : dck_conditions(req.dck))
        cfg.extra_condition_pool.push_back(f);
    if (cfg.proc_lines.empty() && !req.dck.empty()) {
        // injected procedures keep their own length; `lines` bounds main
        cfg.proc_lines.push_back(cfg.lines);
        for (const ProcedureDef& p : req.dck)
            cfg.proc_lines.push_back(
                std::max(1, int(p.lines.size()) - 1));
        cfg.procs = int(req.dck.size());
    }

    const bool flat = cfg.procs == 0 && cfg.stack == 1 && req.dck.empty();
    CompiledTask task =
        flat ? compile_flat(req.gp, cfg.lines, cfg.condition_pool, cfg.split)
             : compile_nested(req.gp, cfg);
    if (!req.dck.empty()) task = inject_dck(task, req.dck);

    // verification must give the interpreter at least the compiled stack room
    ExecLimits run_limits = req.run_limits;
    run_limits.max_depth = std::max(run_limits.max_depth, cfg.stack);

    SolveResult solved;
    if (!req.planner_cmd.empty()) {
        PlannerCommand cmd{req.planner_cmd, req.planner_timeout, ""};
        ExternalResult ext = solve_external(task.task, cmd);
        switch (ext.kind) {
        case ExternalResult::Kind::Ok:
            solved.status = SolveStatus::Solved;
            solved.plan = std::move(ext.plan);
            solved.stats.plan_length = int(solved.plan.steps.size());
            break;
        case ExternalResult::Kind::Timeout:
            out.status = SynthStatus::Limit;
            out.detail = ext.detail;
            return out;
        default:
            out.status = SynthStatus::Limit;
            out.detail = "external planner failed: " + ext.detail;
            return out;
        }
    } else {
        solved = req.use_bfs ? bfs_solve(task.task, req.limits)
                             : gbfs_solve(task.task, req.limits);
    }
    out.stats = solved.stats;
    if (solved.status == SolveStatus::LimitHit) {
        out.status = SynthStatus::Limit;
        out.detail = "search limit reached";
        return out;
    }
    if (solved.status == SolveStatus::Unsolvable) {
        out.status = SynthStatus::Unsolvable;
        out.detail = "no program within the given bounds";
        return out;
    }

    out.plan = solved.plan;
    out.program = decode_plan(solved.plan, task);
    out.used_lines = last_programmed_line(out.program.procs[0]);

    SolveReport train = solves(out.program, req.gp, run_limits);
    if (!train.solved) {
        out.status = SynthStatus::VerificationFailed;
        out.detail = "decoded program fails a training instance";
        return out;
    }
    if (req.holdout) {
        PlanningProgram rebound =
            rebind_program(out.program, *req.gp.core, *req.holdout->core);
        SolveReport held = solves(rebound, *req.holdout, run_limits);
        if (!held.solved) {
            out.status = SynthStatus::VerificationFailed;
            out.detail = "decoded program fails a held-out instance";
            return out;
        }
    }
    out.status = SynthStatus::Solved;
    return out;
}

const char* to_string(SolutionKind k) {
    switch (k) {
    case SolutionKind::OP: return "OP";
    case SolutionKind::NP: return "NP";
    case SolutionKind::R: return "R";
    case SolutionKind::RP: return "RP";
    case SolutionKind::ME: return "ME";
    }
    return "?";
}

SolutionKind classify_program(const PlanningProgram& prog) {
    // recursion: a cycle in the call graph
    std::size_t count = prog.procs.size();
    std::vector<std::vector<int>> edges(count);
    bool any_param_callee = false;
    for (std::size_t j = 0; j < count; ++j)
        for (const auto& line : prog.procs[j].lines)
            if (line && line->kind == Instruction::Kind::Call)
                edges[j].push_back(line->callee);
    std::function<bool(int, std::vector<int>&)> on_cycle =
        [&](int at, std::vector<int>& mark) {
            mark[std::size_t(at)] = 1;
            for (int nxt : edges[std::size_t(at)]) {
                if (mark[std::size_t(nxt)] == 1) {
                    if (!prog.procs[std::size_t(nxt)].params.empty())
                        any_param_callee = true;
                    return true;
                }
                if (mark[std::size_t(nxt)] == 0 && on_cycle(nxt, mark))
                    return true;
            }
            mark[std::size_t(at)] = 2;
            return false;
        };
    std::vector<int> mark(count, 0);
    bool recursive = false;
    for (std::size_t j = 0; j < count; ++j) {
        std::fill(mark.begin(), mark.end(), 0);
        if (on_cycle(int(j), mark)) {
            recursive = true;
            break;
        }
    }
    if (recursive) return any_param_callee ? SolutionKind::RP : SolutionKind::R;
    return count > 1 ? SolutionKind::NP : SolutionKind::OP;
}

std::string BenchReport::render() const {
    std::ostringstream os;
    os << "procedure  lines  instances  time(s)  plan  kind\n";
    double total = 0;
    for (const BenchRow& r : rows) {
        total += r.seconds;
        os << r.procedure << "  " << r.lines << "  " << r.instances << "  ";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", r.seconds);
        os << buf << "  ";
        if (r.plan_length >= 0)
            os << r.plan_length;
        else
            os << "-";
        os << "  " << (r.note.empty() ? to_string(kind) : r.note) << "\n";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", total);
    os << "total time(s): " << buf << "\n";
    return os.str();
}

PipelineOutcome run_pipeline(const PipelineRequest& req) {
    PipelineOutcome out;
    if (!req.recipe.subtasks || req.recipe.subtasks->subtasks.empty())
        throw BadConfigError("domain " + req.recipe.name +
                             " has no subtask decomposition");
    const SubtaskSuite& suite = *req.recipe.subtasks;
    const int b = int(suite.subtasks.size());

    // Phase 1: one flat synthesis per subtask, independently.
    auto solve_subtask = [&](const SubtaskDef& def) {
        SynthRequest sreq;
        sreq.gp = def.gp;
        sreq.cfg.lines = req.subtask_lines.value_or(def.suggested_lines);
        sreq.cfg.procs = 0;
        sreq.cfg.stack = 1;
        sreq.cfg.split = req.split;
        sreq.cfg.condition_pool = def.gp.condition_pool;
        sreq.limits = req.limits;
        sreq.run_limits = req.run_limits;
        sreq.planner_cmd = req.planner_cmd;
        sreq.planner_timeout = req.planner_timeout;
        return synthesize(sreq);
    };

    std::vector<SynthOutcome> sub;
    sub.resize(std::size_t(b));
    if (req.concurrent_subtasks) {
        std::vector<std::future<SynthOutcome>> futures;
        for (const SubtaskDef& def : suite.subtasks)
            futures.push_back(std::async(std::launch::async, solve_subtask,
                                         std::cref(def)));
        for (int q = 0; q < b; ++q) sub[std::size_t(q)] = futures[std::size_t(q)].get();
    } else {
        for (int q = 0; q < b; ++q)
            sub[std::size_t(q)] = solve_subtask(suite.subtasks[std::size_t(q)]);
    }

    std::vector<ProcedureDef> dck;
    for (int q = 0; q < b; ++q) {
        const SubtaskDef& def = suite.subtasks[std::size_t(q)];
        const SynthOutcome& so = sub[std::size_t(q)];
        BenchRow row{def.proc_name, so.used_lines,
                     int(def.gp.instances.size()), so.stats.seconds,
                     so.stats.plan_length, ""};
        if (so.status != SynthStatus::Solved) {
            row.note = "ME";
            out.report.rows.push_back(row);
            out.status = so.status;
            out.failed_stage = def.proc_name;
            return out;
        }
        out.report.rows.push_back(row);
        ProcedureDef proc;
        proc.name = def.proc_name;
        proc.params = def.params;
        proc.lines = so.program.procs[0].lines;
        dck.push_back(std::move(proc));
    }

    // Phase 2: synthesize main with the procedures injected.
    SynthRequest mreq;
    mreq.gp = req.recipe.gp;
    mreq.cfg.lines = req.main_lines;
    mreq.cfg.procs = b;
    mreq.cfg.stack = req.stack;
    mreq.cfg.split = req.split;
    mreq.cfg.condition_pool =
        req.main_condition_pool.value_or(req.recipe.gp.condition_pool);
    mreq.cfg.signatures.push_back({"main", {}});
    for (const SubtaskDef& def : suite.subtasks)
        mreq.cfg.signatures.push_back({def.proc_name, def.params});
    mreq.dck = dck;
    mreq.limits = req.main_limits;
    mreq.run_limits = req.run_limits;
    mreq.planner_cmd = req.planner_cmd;
    mreq.planner_timeout = req.planner_timeout;
    SynthOutcome main_out = synthesize(mreq);

    BenchRow row{"main", main_out.used_lines, int(req.recipe.gp.instances.size()),
                 main_out.stats.seconds, main_out.stats.plan_length, ""};
    if (main_out.status != SynthStatus::Solved) {
        row.note = "ME";
        out.report.rows.insert(out.report.rows.begin(), row);
        out.status = main_out.status;
        out.failed_stage = "main";
        return out;
    }
    out.report.rows.insert(out.report.rows.begin(), row);

    out.program = main_out.program;
    out.report.kind = classify_program(out.program);
    out.status = SynthStatus::Solved;
    out.solved = true;
    return out;
}

} // namespace genplan
