#include "genplan/program.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_set>

namespace genplan {

// -- Instruction / PlanningProgram --------------------------------------------

Instruction Instruction::act(int action_index) {
    Instruction i;
    i.kind = Kind::Act;
    i.action = action_index;
    return i;
}

Instruction Instruction::jump(int target, FluentId condition) {
    Instruction i;
    i.kind = Kind::Goto;
    i.target = target;
    i.condition = condition;
    return i;
}

Instruction Instruction::call(int callee, std::vector<int> args) {
    Instruction i;
    i.kind = Kind::Call;
    i.callee = callee;
    i.args = std::move(args);
    return i;
}

Instruction Instruction::end() {
    Instruction i;
    i.kind = Kind::End;
    return i;
}

int PlanningProgram::proc_index(std::string_view name) const {
    for (std::size_t j = 0; j < procs.size(); ++j)
        if (procs[j].name == name) return int(j);
    return -1;
}

int PlanningProgram::line_span() const {
    int span = 0;
    for (const ProcedureDef& p : procs)
        span = std::max(span, int(p.lines.size()) - 1);
    return span;
}

void check_program(const PlanningProgram& prog, const ProblemCore& core) {
    if (prog.procs.empty()) throw Error("program has no procedures");
    if (prog.procs[0].name != "main")
        throw Error("procedure 0 must be main");
    if (!prog.procs[0].params.empty())
        throw Error("main takes no parameters");
    for (const ProcedureDef& p : prog.procs) {
        for (const ProcParam& par : p.params) {
            if (par.fixed_var < 0 ||
                par.fixed_var >= int(core.variables.size()))
                throw Error("procedure " + p.name + ": bad parameter variable");
            const VariableObject& v =
                core.variables[std::size_t(par.fixed_var)];
            if (v.domain != par.domain)
                throw Error("procedure " + p.name + ": parameter domain mismatch");
            if (!v.stackable)
                throw Error("procedure " + p.name + ": parameter variable " +
                            v.name + " is not stackable");
        }
        for (std::size_t i = 0; i < p.lines.size(); ++i) {
            if (!p.lines[i]) continue;
            const Instruction& ins = *p.lines[i];
            switch (ins.kind) {
            case Instruction::Kind::Act:
                if (ins.action < 0 || ins.action >= int(core.actions.size()))
                    throw Error(p.name + " line " + std::to_string(i) +
                                ": unknown action");
                break;
            case Instruction::Kind::Goto:
                if (ins.target < 0 || ins.target >= int(p.lines.size()))
                    throw Error(p.name + " line " + std::to_string(i) +
                                ": goto target out of range");
                if (ins.condition < 0 ||
                    ins.condition >= FluentId(core.fluents.size()))
                    throw Error(p.name + " line " + std::to_string(i) +
                                ": unknown goto condition");
                break;
            case Instruction::Kind::Call: {
                if (ins.callee < 0 || ins.callee >= int(prog.procs.size()))
                    throw Error(p.name + " line " + std::to_string(i) +
                                ": unknown callee");
                const ProcedureDef& callee = prog.procs[std::size_t(ins.callee)];
                if (ins.args.size() != callee.params.size())
                    throw Error(p.name + " line " + std::to_string(i) +
                                ": call arity mismatch");
                for (std::size_t q = 0; q < ins.args.size(); ++q) {
                    int v = ins.args[q];
                    if (v < 0 || v >= int(core.variables.size()))
                        throw Error(p.name + " line " + std::to_string(i) +
                                    ": bad call argument");
                    if (core.variables[std::size_t(v)].domain !=
                        callee.params[q].domain)
                        throw Error(p.name + " line " + std::to_string(i) +
                                    ": call argument domain mismatch");
                }
                break;
            }
            case Instruction::Kind::End:
                if (i == 0)
                    throw Error(p.name + ": end may not occupy line 0");
                break;
            }
        }
    }
}

const char* to_string(RunStatus s) {
    switch (s) {
    case RunStatus::Terminated: return "terminated";
    case RunStatus::FailedLoop: return "failed-loop";
    case RunStatus::FailedDepth: return "failed-depth";
    case RunStatus::FailedBudget: return "failed-budget";
    case RunStatus::FailedError: return "failed-error";
    }
    return "?";
}

// -- Interpreter ---------------------------------------------------------------

namespace {

struct Frame {
    int proc;
    int pc;
};

struct VecHash {
    std::size_t operator()(const std::vector<std::uint64_t>& v) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ull;
        for (std::uint64_t w : v) {
            std::uint64_t x = w + 0x9e3779b97f4a7c15ull + h;
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
            h = x ^ (x >> 31);
        }
        return std::size_t(h);
    }
};

// One interpreter run. The state splits into global fluents (kept in `base`)
// and per-level replicas of the stackable set K.
class Interp {
public:
    Interp(const PlanningProgram& prog, const ClassicalProblem& p,
           const ExecLimits& limits)
        : prog_(prog), core_(*p.core), limits_(limits),
          kindex_(p.core->k_index()), base_(p.initial) {
        // Stackable fluents live in level replicas; zero them in base so the
        // same valuation never exists twice.
        levels_.emplace_back(core_.stackable.size());
        for (std::size_t i = 0; i < core_.stackable.size(); ++i) {
            FluentId f = core_.stackable[i];
            if (base_.test(f)) levels_[0].set(FluentId(i), true);
            base_.set(f, false);
        }
        stack_.push_back({0, 0});
        remember();
    }

    std::optional<RunStatus> public_step() {
        if (done_) return done_; // the run is over; repeat the verdict
        if (steps_ >= limits_.max_steps)
            done_ = RunStatus::FailedBudget;
        else
            done_ = step(nullptr);
        return done_;
    }

    int level() const { return int(stack_.size()); }
    int proc() const { return stack_.empty() ? -1 : stack_.back().proc; }
    int pc() const { return stack_.empty() ? -1 : stack_.back().pc; }
    bool query(FluentId f) const {
        if (!levels_.empty()) return holds_at(pos(f), level());
        int ki = kindex_[std::size_t(f)];
        return ki >= 0 ? false : base_.test(f);
    }

    RunOutcome run() {
        RunOutcome out;
        while (true) {
            if (steps_ >= limits_.max_steps) {
                out.status = RunStatus::FailedBudget;
                break;
            }
            std::optional<RunStatus> done = step(&out);
            if (done) {
                out.status = *done;
                break;
            }
        }
        out.steps = steps_;
        out.detail = detail_;
        if (out.status == RunStatus::Terminated) out.final_state = final_state_;
        if (limits_.record_trace) {
            out.trace = std::move(trace_);
            // final configuration, so a terminated trace has steps+1 entries
            if (out.status == RunStatus::Terminated)
                out.trace.push_back({0, 0, -1, "<terminated>"});
        }
        return out;
    }

private:
    bool holds_at(Literal l, int level) const {
        int ki = kindex_[std::size_t(l.fluent)];
        bool v = ki >= 0 ? levels_[std::size_t(level - 1)].test(FluentId(ki))
                         : base_.test(l.fluent);
        return v == l.positive;
    }

    bool satisfied_at(const LiteralSet& ls, int level) const {
        for (Literal l : ls)
            if (!holds_at(l, level)) return false;
        return true;
    }

    void write_at(Literal l, int level) {
        int ki = kindex_[std::size_t(l.fluent)];
        if (ki >= 0)
            levels_[std::size_t(level - 1)].set(FluentId(ki), l.positive);
        else
            base_.set(l.fluent, l.positive);
    }

    // Applies a ground action with K-fluents resolved at `level`.
    bool apply_at(const Action& a, int level) {
        if (!satisfied_at(a.precondition, level)) {
            detail_ = "action " + a.name + " not applicable";
            return false;
        }
        LiteralSet eff;
        for (const ConditionalEffect& ce : a.effects) {
            if (!satisfied_at(ce.condition, level)) continue;
            for (Literal l : ce.effect) {
                if (!eff.try_add(l)) {
                    detail_ = "action " + a.name + " has conflicting effects";
                    return false;
                }
            }
        }
        for (Literal l : eff) write_at(l, level);
        return true;
    }

    // Full-configuration key: global state, every level replica, call stack.
    std::vector<std::uint64_t> config_key() const {
        std::vector<std::uint64_t> key = base_.words();
        for (const State& lv : levels_)
            key.insert(key.end(), lv.words().begin(), lv.words().end());
        for (const Frame& fr : stack_)
            key.push_back((std::uint64_t(std::uint32_t(fr.proc)) << 32) |
                          std::uint64_t(std::uint32_t(fr.pc)));
        key.push_back(std::uint64_t(stack_.size()));
        return key;
    }

    bool remember() { return seen_.insert(config_key()).second; }

    State goal_view() const {
        State s = base_;
        for (std::size_t i = 0; i < core_.stackable.size(); ++i)
            s.set(core_.stackable[i], levels_[0].test(FluentId(i)));
        return s;
    }

    // Executes the instruction under the top frame's pc. Returns the final
    // status when the run ends, nullopt while it keeps going.
    std::optional<RunStatus> step(RunOutcome*) {
        Frame& top = stack_.back();
        int level = int(stack_.size());
        const ProcedureDef& proc = prog_.procs[std::size_t(top.proc)];
        if (top.pc < 0 || top.pc >= int(proc.lines.size()) ||
            !proc.lines[std::size_t(top.pc)]) {
            detail_ = proc.name + ": reached line " + std::to_string(top.pc) +
                      " without an instruction";
            return RunStatus::FailedError;
        }
        const Instruction& ins = *proc.lines[std::size_t(top.pc)];
        if (limits_.record_trace)
            trace_.push_back({level, top.proc, top.pc,
                              format_instruction(ins, core_, &prog_)});
        ++steps_;

        switch (ins.kind) {
        case Instruction::Kind::Act: {
            const Action& a = core_.actions[std::size_t(ins.action)];
            if (!apply_at(a, level)) return RunStatus::FailedError;
            top.pc += 1;
            break;
        }
        case Instruction::Kind::Goto: {
            bool cond = holds_at(pos(ins.condition), level);
            top.pc = cond ? top.pc + 1 : ins.target; // jump when false
            break;
        }
        case Instruction::Kind::Call: {
            if (level >= limits_.max_depth) {
                detail_ = "call at stack bound " +
                          std::to_string(limits_.max_depth);
                return RunStatus::FailedDepth;
            }
            top.pc += 1; // return address
            const ProcedureDef& callee = prog_.procs[std::size_t(ins.callee)];
            State fresh(core_.stackable.size());
            // Copy each argument's value (and refreshed derived bits) into
            // the callee's fixed parameter variable one level up.
            std::vector<std::pair<FluentId, bool>> writes;
            for (std::size_t q = 0; q < ins.args.size(); ++q) {
                const VariableObject& src =
                    core_.variables[std::size_t(ins.args[q])];
                const VariableObject& dst =
                    core_.variables[std::size_t(callee.params[q].fixed_var)];
                int value = -1;
                for (std::size_t x = 0; x < src.assign.size(); ++x)
                    if (holds_at(pos(src.assign[x]), level)) {
                        value = int(x);
                        break;
                    }
                if (value < 0) continue; // unassigned argument: copy nothing
                writes.emplace_back(dst.assign[std::size_t(value)], true);
                for (const VariableObject::DerivedBit& bit : dst.derived) {
                    const auto& guard = bit.guard_by_value[std::size_t(value)];
                    if (guard && satisfied_at(*guard, level))
                        writes.emplace_back(bit.fluent, true);
                }
            }
            stack_.push_back({ins.callee, 0});
            levels_.push_back(std::move(fresh));
            int ki;
            for (auto [f, v] : writes)
                if ((ki = kindex_[std::size_t(f)]) >= 0)
                    levels_.back().set(FluentId(ki), v);
                else
                    base_.set(f, v);
            break;
        }
        case Instruction::Kind::End: {
            bool was_root = (level == 1);
            if (was_root) final_state_ = goal_view();
            stack_.pop_back();
            levels_.pop_back(); // parameter fluents of the level die with it
            if (was_root) return RunStatus::Terminated;
            break;
        }
        }
        if (!remember()) {
            detail_ = "configuration repeated";
            return RunStatus::FailedLoop;
        }
        return std::nullopt;
    }

    const PlanningProgram& prog_;
    const ProblemCore& core_;
    ExecLimits limits_;
    std::vector<int> kindex_;

    State base_;
    std::vector<State> levels_;
    std::vector<Frame> stack_;
    std::unordered_set<std::vector<std::uint64_t>, VecHash> seen_;
    long steps_ = 0;
    std::optional<RunStatus> done_;
    std::string detail_;
    State final_state_;
    std::vector<TraceStep> trace_;
};

} // namespace

RunOutcome run_program(const PlanningProgram& prog, const ClassicalProblem& p,
                       const ExecLimits& limits) {
    Interp interp(prog, p, limits);
    return interp.run();
}

struct ProgramStepper::Impl {
    Interp interp;
    Impl(const PlanningProgram& prog, const ClassicalProblem& p,
         const ExecLimits& limits)
        : interp(prog, p, limits) {}
};

ProgramStepper::ProgramStepper(const PlanningProgram& prog,
                               const ClassicalProblem& p,
                               const ExecLimits& limits)
    : impl_(std::make_unique<Impl>(prog, p, limits)) {}
ProgramStepper::~ProgramStepper() = default;
ProgramStepper::ProgramStepper(ProgramStepper&&) noexcept = default;

std::optional<RunStatus> ProgramStepper::step() {
    return impl_->interp.public_step();
}
int ProgramStepper::level() const { return impl_->interp.level(); }
int ProgramStepper::proc() const { return impl_->interp.proc(); }
int ProgramStepper::pc() const { return impl_->interp.pc(); }
bool ProgramStepper::holds(FluentId f) const { return impl_->interp.query(f); }

SolveReport solves(const PlanningProgram& prog, const GeneralizedProblem& gp,
                   const ExecLimits& limits) {
    SolveReport report;
    for (std::size_t t = 0; t < gp.instances.size(); ++t) {
        RunOutcome out = run_program(prog, gp.instance_problem(t), limits);
        InstanceReport ir;
        ir.status = out.status;
        ir.steps = out.steps;
        ir.goal_holds = out.terminated() &&
                        out.final_state.satisfies(gp.instances[t].goal);
        report.solved = report.solved && ir.solved();
        report.instances.push_back(ir);
    }
    return report;
}

// -- Text format ----------------------------------------------------------------

std::string format_instruction(const Instruction& ins, const ProblemCore& core,
                               const PlanningProgram* prog) {
    std::ostringstream os;
    switch (ins.kind) {
    case Instruction::Kind::Act:
        os << core.actions[std::size_t(ins.action)].name;
        break;
    case Instruction::Kind::Goto:
        os << "goto(" << ins.target << ", !("
           << core.fluents.name(ins.condition) << "))";
        break;
    case Instruction::Kind::Call: {
        os << "call ";
        if (prog && ins.callee < int(prog->procs.size()))
            os << prog->procs[std::size_t(ins.callee)].name;
        else
            os << "p" << ins.callee;
        os << "(";
        for (std::size_t q = 0; q < ins.args.size(); ++q) {
            if (q) os << ", ";
            os << core.variables[std::size_t(ins.args[q])].name;
        }
        os << ")";
        break;
    }
    case Instruction::Kind::End:
        os << "end";
        break;
    }
    return os.str();
}

std::string format_program(const PlanningProgram& prog,
                           const ProblemCore& core) {
    std::ostringstream os;
    for (const ProcedureDef& p : prog.procs) {
        os << "proc " << p.name;
        if (!p.params.empty()) {
            os << "(";
            for (std::size_t q = 0; q < p.params.size(); ++q) {
                if (q) os << ", ";
                os << core.variables[std::size_t(p.params[q].fixed_var)].name
                   << ": " << p.params[q].domain;
            }
            os << ")";
        }
        os << " {\n";
        for (std::size_t i = 0; i < p.lines.size(); ++i) {
            os << "  " << i << ". ";
            if (p.lines[i])
                os << format_instruction(*p.lines[i], core, &prog);
            else
                os << "nil";
            os << "\n";
        }
        os << "}\n";
    }
    return os.str();
}

namespace {

std::string trim(std::string s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

struct Segment {
    int line_no; // source line, for errors
    int index;   // program line index
    std::string text;
};

} // namespace

PlanningProgram parse_program(const std::string& text,
                              const ProblemCore& core) {
    // First pass: procedure headers and body segments.
    struct RawProc {
        std::string name;
        std::vector<std::pair<std::string, std::string>> params; // var, domain
        std::vector<Segment> segments;
        int header_line;
    };
    std::vector<RawProc> raw;
    bool in_body = false;

    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        if (!in_body) {
            if (t.rfind("proc ", 0) != 0)
                throw ParseError(line_no, "expected 'proc <name> ... {'");
            if (t.back() != '{')
                throw ParseError(line_no, "expected '{' at end of proc header");
            std::string head = trim(t.substr(5, t.size() - 6));
            RawProc rp;
            rp.header_line = line_no;
            std::size_t par = head.find('(');
            if (par == std::string::npos) {
                rp.name = trim(head);
            } else {
                if (head.back() != ')')
                    throw ParseError(line_no, "unterminated parameter list");
                rp.name = trim(head.substr(0, par));
                std::string inner = head.substr(par + 1,
                                                head.size() - par - 2);
                if (!trim(inner).empty()) {
                    for (const std::string& piece : split(inner, ',')) {
                        std::vector<std::string> kv = split(piece, ':');
                        if (kv.size() != 2 || kv[0].empty() || kv[1].empty())
                            throw ParseError(line_no,
                                             "parameter must be 'var: domain'");
                        rp.params.emplace_back(kv[0], kv[1]);
                    }
                }
            }
            if (rp.name.empty())
                throw ParseError(line_no, "missing procedure name");
            raw.push_back(std::move(rp));
            in_body = true;
            continue;
        }
        if (t == "}") {
            in_body = false;
            continue;
        }
        // Split a body line into "N. instr" segments; several may share a line.
        std::size_t at = 0;
        while (at < t.size()) {
            std::size_t num_end = at;
            while (num_end < t.size() && std::isdigit((unsigned char)t[num_end]))
                ++num_end;
            if (num_end == at || num_end >= t.size() || t[num_end] != '.')
                throw ParseError(line_no, "expected '<line>. <instruction>'");
            int index = std::stoi(t.substr(at, num_end - at));
            std::size_t body_start = num_end + 1;
            // The segment runs until the next " <digits>." or end of line.
            std::size_t next = t.size();
            for (std::size_t k = body_start; k + 1 < t.size(); ++k) {
                if (!std::isspace((unsigned char)t[k])) continue;
                std::size_t d = k + 1;
                while (d < t.size() && std::isdigit((unsigned char)t[d])) ++d;
                if (d > k + 1 && d < t.size() && t[d] == '.') {
                    next = k;
                    break;
                }
            }
            std::string body = trim(t.substr(body_start, next - body_start));
            if (body.empty())
                throw ParseError(line_no, "empty instruction");
            raw.back().segments.push_back({line_no, index, body});
            at = next;
            while (at < t.size() && std::isspace((unsigned char)t[at])) ++at;
        }
    }
    if (in_body)
        throw ParseError(line_no, "missing '}'");
    if (raw.empty())
        throw ParseError(1, "no procedures");

    PlanningProgram prog;
    for (const RawProc& rp : raw) {
        ProcedureDef def;
        def.name = rp.name;
        for (const auto& [var, dom] : rp.params) {
            int vi = core.variable_index(var);
            if (vi < 0)
                throw ParseError(rp.header_line, "unknown variable: " + var);
            def.params.push_back({dom, vi});
        }
        prog.procs.push_back(std::move(def));
    }

    auto parse_args = [&](const std::string& inner, int at_line) {
        std::vector<int> args;
        if (trim(inner).empty()) return args;
        for (const std::string& piece : split(inner, ',')) {
            int vi = core.variable_index(piece);
            if (vi < 0)
                throw ParseError(at_line, "unknown variable: " + piece);
            args.push_back(vi);
        }
        return args;
    };

    for (std::size_t j = 0; j < raw.size(); ++j) {
        ProcedureDef& def = prog.procs[j];
        for (const Segment& seg : raw[j].segments) {
            if (seg.index != int(def.lines.size()))
                throw ParseError(seg.line_no,
                                 "expected line " +
                                     std::to_string(def.lines.size()) +
                                     ", found " + std::to_string(seg.index));
            const std::string& b = seg.text;
            Instruction ins;
            if (b == "end") {
                ins = Instruction::end();
            } else if (b.rfind("goto(", 0) == 0) {
                if (b.back() != ')')
                    throw ParseError(seg.line_no, "malformed goto");
                std::string inner = b.substr(5, b.size() - 6);
                std::size_t comma = inner.find(',');
                if (comma == std::string::npos)
                    throw ParseError(seg.line_no, "malformed goto");
                std::string tgt = trim(inner.substr(0, comma));
                std::string cond = trim(inner.substr(comma + 1));
                if (cond.size() < 4 || cond.rfind("!(", 0) != 0 ||
                    cond.back() != ')')
                    throw ParseError(seg.line_no,
                                     "goto condition must be !(fluent)");
                std::string fl = trim(cond.substr(2, cond.size() - 3));
                FluentId f = core.fluents.id(fl);
                if (f == kNoFluent)
                    throw ParseError(seg.line_no, "unknown fluent: " + fl);
                int target;
                try {
                    target = std::stoi(tgt);
                } catch (...) {
                    throw ParseError(seg.line_no, "bad goto target: " + tgt);
                }
                ins = Instruction::jump(target, f);
            } else {
                // call? explicit keyword, or a known procedure name
                std::string body = b;
                bool is_call = false;
                if (body.rfind("call ", 0) == 0) {
                    body = trim(body.substr(5));
                    is_call = true;
                }
                std::size_t par = body.find('(');
                std::string head = par == std::string::npos
                                       ? body
                                       : trim(body.substr(0, par));
                int callee = prog.proc_index(head);
                if (is_call && callee < 0)
                    throw ParseError(seg.line_no,
                                     "unknown procedure: " + head);
                if (callee >= 0) {
                    std::vector<int> args;
                    if (par != std::string::npos) {
                        if (body.back() != ')')
                            throw ParseError(seg.line_no, "malformed call");
                        args = parse_args(
                            body.substr(par + 1, body.size() - par - 2),
                            seg.line_no);
                    }
                    ins = Instruction::call(callee, std::move(args));
                } else {
                    int ai = core.action_index(b);
                    if (ai < 0)
                        throw ParseError(seg.line_no, "unknown action: " + b);
                    ins = Instruction::act(ai);
                }
            }
            def.lines.emplace_back(ins);
        }
        if (def.lines.empty())
            throw ParseError(raw[j].header_line,
                             "procedure " + def.name + " has no lines");
    }

    check_program(prog, core);
    return prog;
}

} // namespace genplan
