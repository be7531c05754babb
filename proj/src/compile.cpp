#include "genplan/compile.hpp"

#include <algorithm>
#include <sstream>

namespace genplan {

void CompilationConfig::validate(const ProblemCore& core) const {
    if (lines < 1) throw BadConfigError("line bound must be >= 1");
    if (stack < 1) throw BadConfigError("stack bound must be >= 1");
    if (procs < 0) throw BadConfigError("procedure bound must be >= 0");
    if (procs > 0 && stack < 2)
        throw BadConfigError("auxiliary procedures need a stack bound >= 2");
    if (one_level_only && stack != 2)
        throw BadConfigError("one-level mode fixes the stack bound at 2");
    if (!proc_lines.empty()) {
        if (int(proc_lines.size()) != procs + 1)
            throw BadConfigError("need one line bound per procedure");
        for (int n : proc_lines)
            if (n < 1) throw BadConfigError("line bounds must be >= 1");
    }
    if (!signatures.empty()) {
        if (int(signatures.size()) != procs + 1)
            throw BadConfigError("need one signature per procedure");
        if (!signatures[0].params.empty())
            throw BadConfigError("main takes no parameters");
        for (const ProcSignature& sig : signatures)
            for (const ProcParam& par : sig.params) {
                if (par.fixed_var < 0 ||
                    par.fixed_var >= int(core.variables.size()))
                    throw BadConfigError("signature " + sig.name +
                                         ": bad parameter variable");
                const VariableObject& v =
                    core.variables[std::size_t(par.fixed_var)];
                if (v.domain != par.domain)
                    throw BadConfigError("signature " + sig.name +
                                         ": parameter domain mismatch");
                if (!v.stackable)
                    throw BadConfigError("signature " + sig.name +
                                         ": parameter variable " + v.name +
                                         " is not stackable");
            }
    }
    for (FluentId f : condition_pool)
        if (f < 0 || f >= FluentId(core.fluents.size()))
            throw BadConfigError("condition pool references unknown fluent");
    for (FluentId f : extra_condition_pool)
        if (f < 0 || f >= FluentId(core.fluents.size()))
            throw BadConfigError("condition pool references unknown fluent");
}

std::vector<FluentId> CompilationConfig::executable_conditions() const {
    std::vector<FluentId> out = condition_pool;
    for (FluentId f : extra_condition_pool)
        if (std::find(out.begin(), out.end(), f) == out.end())
            out.push_back(f);
    return out;
}

namespace {

std::string num(int v) { return std::to_string(v); }

struct CallSig {
    int callee = 0;
    std::vector<int> args; // variable indices
    std::string text;      // call_p<j'>[_<arg>...]
};

// Builds both the flat and the stack compilation; `flat` drops the procedure
// and level dimensions from names and treats every fluent as global.
class Compiler {
public:
    Compiler(const GeneralizedProblem& gp, CompilationConfig cfg, bool flat)
        : gp_(gp), src_(*gp.core), cfg_(std::move(cfg)), flat_(flat),
          b_(flat ? 0 : cfg_.procs), m_(flat ? 1 : cfg_.stack),
          T_(int(gp.instances.size())),
          out_(std::make_shared<ProblemCore>()) {
        if (T_ < 1) throw BadConfigError("no instances to compile");
        if (cfg_.signatures.empty()) {
            cfg_.signatures.push_back({"main", {}});
            for (int j = 1; j <= b_; ++j)
                cfg_.signatures.push_back({"p" + num(j), {}});
        }
        cfg_.validate(src_);
        exec_pool_ = cfg_.executable_conditions();
        kidx_ = src_.k_index();
        n_ = 1;
        for (int j = 0; j <= b_; ++j) n_ = std::max(n_, nj(j));
    }

    CompiledTask build() {
        make_fluents();
        make_call_sigs();
        make_actions();

        CompiledTask t;
        t.task.core = out_;
        t.task.initial = make_initial();
        t.task.goal = make_goal();
        t.decode = std::move(decode_);
        t.fluent_tags = std::move(tags_);
        t.config = cfg_;
        t.source = gp_.core;
        t.flat = flat_;
        t.injected.clear();
        for (int j = 0; j <= b_; ++j)
            t.injected.emplace_back(std::size_t(nj(j)) + 1, std::nullopt);
        return t;
    }

private:
    // -- names -------------------------------------------------------------

    int nj(int j) const { return cfg_.line_bound(j); }

    std::string ins_prefix(int i, int j) const {
        return flat_ ? "ins_l" + num(i) : "ins_l" + num(i) + "_p" + num(j);
    }
    std::string slot(int i, int j, int k) const {
        return flat_ ? "_l" + num(i)
                     : "_l" + num(i) + "_p" + num(j) + "_k" + num(k);
    }

    FluentId add_fluent(const std::string& name, FluentTag tag) {
        FluentId f = out_->fluents.add(name);
        tags_.push_back(std::move(tag));
        return f;
    }

    // -- fluent space --------------------------------------------------------

    bool stacked(FluentId f) const {
        return !flat_ && kidx_[std::size_t(f)] >= 0;
    }

    void make_fluents() {
        base_map_.assign(src_.fluents.size(), kNoFluent);
        repl_.assign(src_.fluents.size(), {});
        for (std::size_t f = 0; f < src_.fluents.size(); ++f) {
            const std::string& name = src_.fluents.name(FluentId(f));
            if (stacked(FluentId(f))) {
                for (int k = 1; k <= m_; ++k)
                    repl_[f].push_back(add_fluent(
                        name + "_k" + num(k),
                        {FluentNs::Stacked, -1, -1, k, -1, name}));
            } else {
                base_map_[f] =
                    add_fluent(name, {FluentNs::Base, -1, -1, -1, -1, name});
            }
        }
        pc_.assign(std::size_t(n_) + 1, {});
        for (int i = 0; i <= n_; ++i)
            for (int k = 1; k <= m_; ++k)
                pc_[std::size_t(i)].push_back(add_fluent(
                    flat_ ? "pc_l" + num(i) : "pc_l" + num(i) + "_k" + num(k),
                    {FluentNs::Pc, i, -1, k, -1, ""}));
        if (!flat_) {
            proc_.assign(std::size_t(b_) + 1, {});
            for (int j = 0; j <= b_; ++j)
                for (int k = 1; k <= m_; ++k)
                    proc_[std::size_t(j)].push_back(
                        add_fluent("proc_p" + num(j) + "_k" + num(k),
                                   {FluentNs::Proc, -1, j, k, -1, ""}));
            for (int k = 1; k <= m_; ++k)
                top_.push_back(add_fluent("top_k" + num(k),
                                          {FluentNs::Top, -1, -1, k, -1, ""}));
        }

        ins_nil_.assign(std::size_t(n_) + 1,
                        std::vector<FluentId>(std::size_t(b_) + 1, kNoFluent));
        ins_act_.assign(std::size_t(n_) + 1, {});
        ins_goto_.assign(std::size_t(n_) + 1, {});
        ins_cond_.assign(std::size_t(n_) + 1, {});
        ins_tgt_.assign(std::size_t(n_) + 1, {});
        ins_end_.assign(std::size_t(n_) + 1,
                        std::vector<FluentId>(std::size_t(b_) + 1, kNoFluent));
        for (int i = 0; i <= n_; ++i) {
            auto& acts = ins_act_[std::size_t(i)];
            auto& gotos = ins_goto_[std::size_t(i)];
            auto& conds = ins_cond_[std::size_t(i)];
            auto& tgts = ins_tgt_[std::size_t(i)];
            acts.assign(std::size_t(b_) + 1, {});
            gotos.assign(std::size_t(b_) + 1, {});
            conds.assign(std::size_t(b_) + 1, {});
            tgts.assign(std::size_t(b_) + 1, {});
            for (int j = 0; j <= b_; ++j) {
                if (i > nj(j)) continue; // beyond this procedure's bound
                ins_nil_[std::size_t(i)][std::size_t(j)] =
                    add_fluent(ins_prefix(i, j) + "_nil",
                               {FluentNs::InsNil, i, j, -1, -1, ""});
                if (i < nj(j)) {
                    for (const Action& a : src_.actions)
                        acts[std::size_t(j)].push_back(add_fluent(
                            ins_prefix(i, j) + "_act_" + a.name,
                            {FluentNs::InsAct, i, j, -1, -1, a.name}));
                    if (cfg_.split) {
                        for (FluentId f : exec_pool_)
                            conds[std::size_t(j)].push_back(add_fluent(
                                ins_prefix(i, j) + "_cond_" +
                                    src_.fluents.name(f),
                                {FluentNs::InsCond, i, j, -1, -1,
                                 src_.fluents.name(f)}));
                        for (int t = 0; t <= nj(j); ++t)
                            tgts[std::size_t(j)].push_back(
                                t == i ? kNoFluent
                                       : add_fluent(ins_prefix(i, j) +
                                                        "_tgt_l" + num(t),
                                                    {FluentNs::InsTgt, i, j,
                                                     -1, t, ""}));
                    } else {
                        auto& per_t = gotos[std::size_t(j)];
                        per_t.assign(std::size_t(nj(j)) + 1, {});
                        for (int t = 0; t <= nj(j); ++t) {
                            if (t == i) continue;
                            for (FluentId f : exec_pool_)
                                per_t[std::size_t(t)].push_back(add_fluent(
                                    ins_prefix(i, j) + "_goto_l" + num(t) +
                                        "_" + src_.fluents.name(f),
                                    {FluentNs::InsGoto, i, j, -1, t,
                                     src_.fluents.name(f)}));
                        }
                    }
                }
                if (i >= 1)
                    ins_end_[std::size_t(i)][std::size_t(j)] =
                        add_fluent(ins_prefix(i, j) + "_end",
                                   {FluentNs::InsEnd, i, j, -1, -1, ""});
            }
        }
        // call instruction fluents are added after the signatures are known
        if (cfg_.split) {
            acc_ = add_fluent("acc", {FluentNs::Acc, -1, -1, -1, -1, ""});
            eval_ = add_fluent("eval", {FluentNs::Eval, -1, -1, -1, -1, ""});
        }
        if (T_ > 1) {
            for (int t = 1; t <= T_; ++t)
                test_.push_back(add_fluent(
                    "test_t" + num(t), {FluentNs::Test, -1, -1, -1, t, ""}));
            for (int t = 1; t <= T_; ++t)
                goal_ok_.push_back(
                    add_fluent("goal_ok_t" + num(t),
                               {FluentNs::GoalOk, -1, -1, -1, t, ""}));
        }
        done_ = add_fluent("done", {FluentNs::Done, -1, -1, -1, -1, ""});
    }

    void make_call_sigs() {
        if (flat_) return;
        for (int callee = 0; callee <= b_; ++callee) {
            const ProcSignature& sig = cfg_.signatures[std::size_t(callee)];
            if (cfg_.one_level_only && callee == 0) continue;
            std::vector<std::vector<int>> cands;
            bool feasible = true;
            for (const ProcParam& par : sig.params) {
                std::vector<int> c;
                for (std::size_t v = 0; v < src_.variables.size(); ++v)
                    if (src_.variables[v].domain == par.domain)
                        c.push_back(int(v));
                if (c.empty()) feasible = false;
                cands.push_back(std::move(c));
            }
            if (!feasible)
                throw BadConfigError("procedure " + sig.name +
                                     ": no variables for a parameter domain");
            std::vector<std::size_t> pick(sig.params.size(), 0);
            while (true) {
                CallSig cs;
                cs.callee = callee;
                cs.text = "call_p" + num(callee);
                for (std::size_t q = 0; q < pick.size(); ++q) {
                    int v = cands[q][pick[q]];
                    cs.args.push_back(v);
                    cs.text += "_" + src_.variables[std::size_t(v)].name;
                }
                calls_.push_back(std::move(cs));
                int at = int(pick.size()) - 1;
                while (at >= 0) {
                    if (++pick[std::size_t(at)] < cands[std::size_t(at)].size())
                        break;
                    pick[std::size_t(at)] = 0;
                    --at;
                }
                if (at < 0) break;
            }
        }
        ins_call_.assign(std::size_t(n_) + 1, {});
        for (int i = 0; i < n_; ++i) {
            ins_call_[std::size_t(i)].assign(std::size_t(b_) + 1, {});
            for (int j = 0; j <= b_; ++j) {
                if (i >= nj(j)) continue;
                for (const CallSig& cs : calls_)
                    ins_call_[std::size_t(i)][std::size_t(j)].push_back(
                        add_fluent(ins_prefix(i, j) + "_" + cs.text,
                                   {FluentNs::InsCall, i, j, -1, -1, cs.text}));
            }
        }
    }

    // -- literal mapping ------------------------------------------------------

    Literal map_at(Literal l, int k) const {
        std::size_t f = std::size_t(l.fluent);
        if (stacked(l.fluent)) return {repl_[f][std::size_t(k - 1)], l.positive};
        return {base_map_[f], l.positive};
    }

    LiteralSet map_at(const LiteralSet& ls, int k) const {
        LiteralSet out;
        for (Literal l : ls) out.add(map_at(l, k));
        return out;
    }

    FluentId pc(int i, int k) const {
        return pc_[std::size_t(i)][std::size_t(k - 1)];
    }

    // -- action emission -------------------------------------------------------

    void add_action(Action a, DecodeEntry e) {
        out_->add_action(std::move(a));
        const std::string& name = out_->actions.back().name;
        decode_.emplace(name, std::move(e));
    }

    // shared execution frame of an instruction action at (i, j, k)
    LiteralSet exec_pre(int i, int j, int k) const {
        LiteralSet pre{pos(pc(i, k))};
        if (!flat_) {
            pre.add(pos(top_[std::size_t(k - 1)]));
            pre.add(pos(proc_[std::size_t(j)][std::size_t(k - 1)]));
        }
        return pre;
    }

    // Emits the P/R pair for a whole-instruction action.
    void emit_pair(const std::string& base_name, int i, int j, int k,
                   const Action& base, FluentId ins_fluent,
                   CompiledActionKind repeat_kind, Instruction payload) {
        Action p = base;
        p.name = "p_" + base_name;
        p.precondition.add(pos(ins_nil_[std::size_t(i)][std::size_t(j)]));
        LiteralSet prog_eff{neg(ins_nil_[std::size_t(i)][std::size_t(j)]),
                            pos(ins_fluent)};
        p.effects.push_back({LiteralSet{}, std::move(prog_eff)});
        add_action(std::move(p),
                   {CompiledActionKind::Program, i, j, k, payload});

        Action r = base;
        r.name = "r_" + base_name;
        r.precondition.add(pos(ins_fluent));
        add_action(std::move(r), {repeat_kind, i, j, k, payload});
    }

    bool emit_at(int j, int k) const {
        if (flat_ || !cfg_.one_level_only) return true;
        return j == 0 ? k == 1 : k == 2;
    }

    void make_actions() {
        // sequential (domain) instructions
        for (int j = 0; j <= b_; ++j)
            for (int i = 0; i < nj(j); ++i)
                for (std::size_t ai = 0; ai < src_.actions.size(); ++ai)
                    for (int k = 1; k <= m_; ++k) {
                        if (!emit_at(j, k)) continue;
                        const Action& a = src_.actions[ai];
                        Action base;
                        base.precondition = exec_pre(i, j, k);
                        for (Literal l : a.precondition)
                            base.precondition.add(map_at(l, k));
                        for (const ConditionalEffect& ce : a.effects)
                            base.effects.push_back(
                                {map_at(ce.condition, k), map_at(ce.effect, k)});
                        base.effects.push_back(
                            {LiteralSet{},
                             LiteralSet{neg(pc(i, k)), pos(pc(i + 1, k))}});
                        emit_pair(a.name + slot(i, j, k), i, j, k, base,
                                  ins_act_[std::size_t(i)][std::size_t(j)][ai],
                                  CompiledActionKind::Repeat,
                                  Instruction::act(int(ai)));
                    }

        // conditional gotos
        if (cfg_.split)
            make_split_gotos();
        else
            make_whole_gotos();

        // calls
        if (!flat_) make_calls();

        // ends
        make_ends();
    }

    void make_whole_gotos() {
        for (int j = 0; j <= b_; ++j)
            for (int i = 0; i < nj(j); ++i)
                for (int t = 0; t <= nj(j); ++t) {
                    if (t == i) continue;
                    for (std::size_t fi = 0; fi < exec_pool_.size(); ++fi)
                        for (int k = 1; k <= m_; ++k) {
                            if (!emit_at(j, k)) continue;
                            FluentId f = exec_pool_[fi];
                            Action base;
                            base.precondition = exec_pre(i, j, k);
                            base.effects.push_back(
                                {LiteralSet{}, LiteralSet{neg(pc(i, k))}});
                            base.effects.push_back(
                                {LiteralSet{negate(map_at(pos(f), k))},
                                 LiteralSet{pos(pc(t, k))}});
                            base.effects.push_back(
                                {LiteralSet{map_at(pos(f), k)},
                                 LiteralSet{pos(pc(i + 1, k))}});
                            std::string base_name = "goto_l" + num(t) + "_" +
                                                    src_.fluents.name(f) +
                                                    slot(i, j, k);
                            bool programmable =
                                std::find(cfg_.condition_pool.begin(),
                                          cfg_.condition_pool.end(),
                                          f) != cfg_.condition_pool.end();
                            FluentId ins =
                                ins_goto_[std::size_t(i)][std::size_t(j)]
                                         [std::size_t(t)][fi];
                            Instruction payload = Instruction::jump(t, f);
                            if (programmable) {
                                emit_pair(base_name, i, j, k, base, ins,
                                          CompiledActionKind::Repeat, payload);
                            } else {
                                Action r = base;
                                r.name = "r_" + base_name;
                                r.precondition.add(pos(ins));
                                add_action(std::move(r),
                                           {CompiledActionKind::Repeat, i, j, k,
                                            payload});
                            }
                        }
                }
    }

    void make_split_gotos() {
        // programming a goto writes its condition and target marks and plays
        // the evaluation; the jump follows as a separate action
        for (int j = 0; j <= b_; ++j)
            for (int i = 0; i < nj(j); ++i)
                for (int t = 0; t <= nj(j); ++t) {
                    if (t == i) continue;
                    for (FluentId f : cfg_.condition_pool) {
                        std::size_t fi = 0;
                        while (exec_pool_[fi] != f) ++fi;
                        for (int k = 1; k <= m_; ++k) {
                            if (!emit_at(j, k)) continue;
                            Action p;
                            p.name = "p_goto_l" + num(t) + "_" +
                                     src_.fluents.name(f) + slot(i, j, k);
                            p.precondition = exec_pre(i, j, k);
                            p.precondition.add(neg(eval_));
                            p.precondition.add(
                                pos(ins_nil_[std::size_t(i)][std::size_t(j)]));
                            p.effects.push_back(
                                {LiteralSet{map_at(pos(f), k)},
                                 LiteralSet{pos(acc_)}});
                            LiteralSet prog{
                                neg(ins_nil_[std::size_t(i)][std::size_t(j)]),
                                pos(ins_cond_[std::size_t(i)][std::size_t(j)][fi]),
                                pos(ins_tgt_[std::size_t(i)][std::size_t(j)]
                                            [std::size_t(t)]),
                                pos(eval_)};
                            p.effects.push_back({LiteralSet{}, std::move(prog)});
                            add_action(std::move(p),
                                       {CompiledActionKind::Program, i, j, k,
                                        Instruction::jump(t, f)});
                        }
                    }
                }
        // repeat the evaluation of the programmed condition
        for (int j = 0; j <= b_; ++j)
            for (int i = 0; i < nj(j); ++i)
                for (std::size_t fi = 0; fi < exec_pool_.size(); ++fi)
                    for (int k = 1; k <= m_; ++k) {
                        if (!emit_at(j, k)) continue;
                        FluentId f = exec_pool_[fi];
                        Action r;
                        r.name = "r_eval_" + src_.fluents.name(f) +
                                 slot(i, j, k);
                        r.precondition = exec_pre(i, j, k);
                        r.precondition.add(neg(eval_));
                        r.precondition.add(
                            pos(ins_cond_[std::size_t(i)][std::size_t(j)][fi]));
                        r.effects.push_back({LiteralSet{map_at(pos(f), k)},
                                             LiteralSet{pos(acc_)}});
                        r.effects.push_back(
                            {LiteralSet{}, LiteralSet{pos(eval_)}});
                        add_action(std::move(r), {CompiledActionKind::Eval, i,
                                                  j, k, std::nullopt});
                    }
        // jump according to the recorded outcome
        for (int j = 0; j <= b_; ++j)
            for (int i = 0; i < nj(j); ++i)
                for (int t = 0; t <= nj(j); ++t) {
                    if (t == i) continue;
                    for (int k = 1; k <= m_; ++k) {
                        if (!emit_at(j, k)) continue;
                        Action r;
                        r.name = "r_jmp_l" + num(t) + slot(i, j, k);
                        r.precondition = exec_pre(i, j, k);
                        r.precondition.add(pos(eval_));
                        r.precondition.add(
                            pos(ins_tgt_[std::size_t(i)][std::size_t(j)]
                                        [std::size_t(t)]));
                        r.effects.push_back(
                            {LiteralSet{},
                             LiteralSet{neg(pc(i, k)), neg(eval_)}});
                        r.effects.push_back(
                            {LiteralSet{neg(acc_)}, LiteralSet{pos(pc(t, k))}});
                        r.effects.push_back(
                            {LiteralSet{pos(acc_)},
                             LiteralSet{pos(pc(i + 1, k)), neg(acc_)}});
                        add_action(std::move(r), {CompiledActionKind::Jmp, i, j,
                                                  k, std::nullopt});
                    }
                }
    }

    void make_calls() {
        for (std::size_t ci = 0; ci < calls_.size(); ++ci) {
            const CallSig& cs = calls_[ci];
            const ProcSignature& sig = cfg_.signatures[std::size_t(cs.callee)];
            for (int j = 0; j <= b_; ++j) {
                if (cfg_.one_level_only && j != 0) continue;
                for (int i = 0; i < nj(j); ++i)
                    for (int k = 1; k < m_; ++k) {
                        if (!emit_at(j, k)) continue;
                        Action base;
                        base.precondition = exec_pre(i, j, k);
                        base.effects.push_back(
                            {LiteralSet{},
                             LiteralSet{neg(pc(i, k)), pos(pc(i + 1, k)),
                                        neg(top_[std::size_t(k - 1)]),
                                        pos(top_[std::size_t(k)])}});
                        base.effects.push_back(
                            {LiteralSet{},
                             LiteralSet{pos(pc(0, k + 1)),
                                        pos(proc_[std::size_t(cs.callee)]
                                                 [std::size_t(k)])}});
                        // copy argument values (and refreshed derived bits)
                        // one level up
                        for (std::size_t q = 0; q < cs.args.size(); ++q) {
                            const VariableObject& from =
                                src_.variables[std::size_t(cs.args[q])];
                            const VariableObject& to = src_.variables[std::size_t(
                                sig.params[q].fixed_var)];
                            for (std::size_t x = 0; x < from.values.size();
                                 ++x) {
                                base.effects.push_back(
                                    {LiteralSet{map_at(pos(from.assign[x]), k)},
                                     LiteralSet{
                                         map_at(pos(to.assign[x]), k + 1)}});
                                for (const VariableObject::DerivedBit& bit :
                                     to.derived) {
                                    const auto& guard = bit.guard_by_value[x];
                                    if (!guard) continue;
                                    LiteralSet cond{
                                        map_at(pos(from.assign[x]), k)};
                                    for (Literal l : *guard)
                                        cond.add(map_at(l, k));
                                    base.effects.push_back(
                                        {std::move(cond),
                                         LiteralSet{map_at(pos(bit.fluent),
                                                           k + 1)}});
                                }
                            }
                        }
                        emit_pair(cs.text + slot(i, j, k), i, j, k, base,
                                  ins_call_[std::size_t(i)][std::size_t(j)][ci],
                                  CompiledActionKind::Call,
                                  Instruction::call(cs.callee, cs.args));
                    }
            }
        }
    }

    std::vector<ConditionalEffect> main_end_effects(int i) {
        std::vector<ConditionalEffect> out;
        if (T_ == 1) {
            out.push_back({LiteralSet{}, LiteralSet{pos(done_)}});
            return out;
        }
        for (int t = 0; t + 1 < T_; ++t) {
            LiteralSet eff{neg(test_[std::size_t(t)]),
                           pos(test_[std::size_t(t) + 1]), neg(pc(i, 1)),
                           pos(pc(0, 1))};
            const State& next = gp_.instances[std::size_t(t) + 1].initial;
            for (std::size_t f = 0; f < src_.fluents.size(); ++f) {
                Literal l{FluentId(f), next.test(FluentId(f))};
                eff.add(map_at(l, 1));
            }
            out.push_back(
                {LiteralSet{pos(test_[std::size_t(t)])}, std::move(eff)});
        }
        out.push_back({LiteralSet{pos(test_.back())}, LiteralSet{pos(done_)}});
        for (int t = 0; t < T_; ++t) {
            LiteralSet cond{pos(test_[std::size_t(t)])};
            for (Literal l : gp_.instances[std::size_t(t)].goal)
                cond.add(map_at(l, 1));
            out.push_back(
                {std::move(cond), LiteralSet{pos(goal_ok_[std::size_t(t)])}});
        }
        return out;
    }

    void make_ends() {
        // termination of main on stack level 1: checks the goal, moves to the
        // next instance or finishes
        for (int i = 1; i <= nj(0); ++i) {
            Action base;
            base.precondition = exec_pre(i, 0, 1);
            base.effects = main_end_effects(i);
            emit_pair("end" + slot(i, 0, 1), i, 0, 1, base,
                      ins_end_[std::size_t(i)][0], CompiledActionKind::End,
                      Instruction::end());
        }
        if (flat_) return;
        // popping a frame from any deeper level
        for (int j = 0; j <= b_; ++j)
            for (int i = 1; i <= nj(j); ++i)
                for (int k = 2; k <= m_; ++k) {
                    if (!emit_at(j, k)) continue;
                    if (j == 0 && cfg_.one_level_only) continue;
                    Action base;
                    base.precondition = exec_pre(i, j, k);
                    LiteralSet eff{neg(top_[std::size_t(k - 1)]),
                                   neg(pc(i, k)),
                                   neg(proc_[std::size_t(j)][std::size_t(k - 1)]),
                                   pos(top_[std::size_t(k - 2)])};
                    for (FluentId f : src_.stackable)
                        eff.add(neg(repl_[std::size_t(f)][std::size_t(k - 1)]));
                    base.effects.push_back({LiteralSet{}, std::move(eff)});
                    emit_pair("end" + slot(i, j, k), i, j, k, base,
                              ins_end_[std::size_t(i)][std::size_t(j)],
                              CompiledActionKind::End, Instruction::end());
                }
    }

    State make_initial() const {
        State s(out_->fluents.size());
        const State& i1 = gp_.instances[0].initial;
        for (std::size_t f = 0; f < src_.fluents.size(); ++f) {
            if (!i1.test(FluentId(f))) continue;
            if (stacked(FluentId(f)))
                s.set(repl_[f][0], true);
            else
                s.set(base_map_[f], true);
        }
        for (int j = 0; j <= b_; ++j)
            for (int i = 0; i <= nj(j); ++i)
                s.set(ins_nil_[std::size_t(i)][std::size_t(j)], true);
        s.set(pc(0, 1), true);
        if (!flat_) {
            s.set(top_[0], true);
            s.set(proc_[0][0], true);
        }
        if (T_ > 1) s.set(test_[0], true);
        return s;
    }

    LiteralSet make_goal() const {
        LiteralSet g;
        if (T_ == 1) {
            for (Literal l : gp_.instances[0].goal) g.add(map_at(l, 1));
        } else {
            for (FluentId f : goal_ok_) g.add(pos(f));
        }
        g.add(pos(done_));
        return g;
    }

    const GeneralizedProblem& gp_;
    const ProblemCore& src_;
    CompilationConfig cfg_;
    bool flat_;
    int n_, b_, m_, T_;

    std::shared_ptr<ProblemCore> out_;
    std::vector<int> kidx_;
    std::vector<FluentTag> tags_;
    std::unordered_map<std::string, DecodeEntry> decode_;
    std::vector<FluentId> exec_pool_;

    std::vector<FluentId> base_map_;
    std::vector<std::vector<FluentId>> repl_;
    std::vector<std::vector<FluentId>> pc_;
    std::vector<std::vector<FluentId>> proc_;
    std::vector<FluentId> top_;
    std::vector<std::vector<FluentId>> ins_nil_;
    std::vector<std::vector<std::vector<FluentId>>> ins_act_;
    std::vector<std::vector<std::vector<std::vector<FluentId>>>> ins_goto_;
    std::vector<std::vector<std::vector<FluentId>>> ins_cond_;
    std::vector<std::vector<std::vector<FluentId>>> ins_tgt_;
    std::vector<std::vector<std::vector<FluentId>>> ins_call_;
    std::vector<std::vector<FluentId>> ins_end_;
    std::vector<CallSig> calls_;
    FluentId acc_ = kNoFluent, eval_ = kNoFluent, done_ = kNoFluent;
    std::vector<FluentId> test_, goal_ok_;
};

} // namespace

CompiledTask compile_flat(const GeneralizedProblem& gp, int n,
                          const std::vector<FluentId>& condition_pool,
                          bool split) {
    if (condition_pool.empty())
        throw BadConfigError("flat compilation needs a condition pool");
    CompilationConfig cfg;
    cfg.lines = n;
    cfg.procs = 0;
    cfg.stack = 1;
    cfg.split = split;
    cfg.condition_pool = condition_pool;
    Compiler c(gp, cfg, /*flat=*/true);
    return c.build();
}

CompiledTask compile_nested(const GeneralizedProblem& gp,
                            const CompilationConfig& cfg) {
    Compiler c(gp, cfg, /*flat=*/false);
    return c.build();
}

long CompiledTask::goto_machinery_count() const {
    long count = 0;
    for (const auto& [name, e] : decode) {
        (void)name;
        if (e.kind == CompiledActionKind::Eval ||
            e.kind == CompiledActionKind::Jmp)
            ++count;
        else if (e.kind == CompiledActionKind::Repeat && e.payload &&
                 e.payload->kind == Instruction::Kind::Goto)
            ++count;
    }
    return count;
}

std::string CompiledTask::render_tag(const FluentTag& tag) const {
    auto num = [](int v) { return std::to_string(v); };
    std::string ins = flat ? "ins_l" + num(tag.line)
                           : "ins_l" + num(tag.line) + "_p" + num(tag.proc);
    switch (tag.ns) {
    case FluentNs::Base: return tag.payload;
    case FluentNs::Stacked: return tag.payload + "_k" + num(tag.level);
    case FluentNs::Pc:
        return flat ? "pc_l" + num(tag.line)
                    : "pc_l" + num(tag.line) + "_k" + num(tag.level);
    case FluentNs::Proc: return "proc_p" + num(tag.proc) + "_k" + num(tag.level);
    case FluentNs::Top: return "top_k" + num(tag.level);
    case FluentNs::InsNil: return ins + "_nil";
    case FluentNs::InsAct: return ins + "_act_" + tag.payload;
    case FluentNs::InsGoto:
        return ins + "_goto_l" + num(tag.aux) + "_" + tag.payload;
    case FluentNs::InsCond: return ins + "_cond_" + tag.payload;
    case FluentNs::InsTgt: return ins + "_tgt_l" + num(tag.aux);
    case FluentNs::InsCall: return ins + "_" + tag.payload;
    case FluentNs::InsEnd: return ins + "_end";
    case FluentNs::Acc: return "acc";
    case FluentNs::Eval: return "eval";
    case FluentNs::Test: return "test_t" + num(tag.aux);
    case FluentNs::GoalOk: return "goal_ok_t" + num(tag.aux);
    case FluentNs::Done: return "done";
    }
    return "?";
}

namespace {

// The fluents that represent instruction w on line i of procedure j, within
// an existing compiled task's fluent table.
std::vector<FluentId> instruction_fluents(const CompiledTask& task,
                                          const Instruction& w, int i, int j) {
    const ProblemCore& out = *task.task.core;
    const ProblemCore& src = *task.source;
    const bool flat = task.flat;
    auto prefix = [&](int line, int proc) {
        return flat ? "ins_l" + std::to_string(line)
                    : "ins_l" + std::to_string(line) + "_p" + std::to_string(proc);
    };
    auto require = [&](const std::string& name) {
        FluentId f = out.fluents.id(name);
        if (f == kNoFluent)
            throw Error("instruction not representable in compiled task: " +
                        name);
        return f;
    };
    switch (w.kind) {
    case Instruction::Kind::Act:
        return {require(prefix(i, j) + "_act_" +
                        src.actions[std::size_t(w.action)].name)};
    case Instruction::Kind::Goto: {
        if (w.target == i)
            throw Error("goto may not target its own line");
        const std::string cond = src.fluents.name(w.condition);
        if (task.config.split)
            return {require(prefix(i, j) + "_cond_" + cond),
                    require(prefix(i, j) + "_tgt_l" + std::to_string(w.target))};
        return {require(prefix(i, j) + "_goto_l" + std::to_string(w.target) +
                        "_" + cond)};
    }
    case Instruction::Kind::Call: {
        std::string sig = "call_p" + std::to_string(w.callee);
        for (int v : w.args) sig += "_" + src.variables[std::size_t(v)].name;
        return {require(prefix(i, j) + "_" + sig)};
    }
    case Instruction::Kind::End:
        return {require(prefix(i, j) + "_end")};
    }
    return {};
}

} // namespace

namespace {

void inject_procedure(CompiledTask& out, const CompiledTask& task,
                      const ProcedureDef& def, int j) {
    const int n = task.config.line_bound(j);
    const ProcSignature& sig = task.config.signatures[std::size_t(j)];
    if (def.params.size() != sig.params.size())
        throw BadConfigError("procedure " + def.name +
                             ": parameter count differs from signature");
    for (std::size_t p = 0; p < def.params.size(); ++p)
        if (def.params[p].fixed_var != sig.params[p].fixed_var)
            throw BadConfigError("procedure " + def.name +
                                 ": parameter variables differ from signature");
    if (int(def.lines.size()) > n + 1)
        throw BadConfigError("procedure " + def.name + " exceeds " +
                             std::to_string(n) + " lines");
    if (def.lines.empty() || !def.lines[0])
        throw Error("procedure " + def.name + " has no first instruction");
    for (int i = 0; i <= n; ++i) {
        std::optional<Instruction> w;
        if (i < int(def.lines.size())) w = def.lines[std::size_t(i)];
        if (!w) {
            if (i == 0) throw Error("line 0 of " + def.name + " is empty");
            w = Instruction::end(); // close unused trailing lines
        }
        if (i == n && w->kind != Instruction::Kind::End)
            throw BadConfigError("procedure " + def.name + ": line " +
                                 std::to_string(n) + " must be end");
        if (w->kind == Instruction::Kind::End && i == 0)
            throw Error("end may not occupy line 0");
        std::string prefix = task.flat
                                 ? "ins_l" + std::to_string(i)
                                 : "ins_l" + std::to_string(i) + "_p" +
                                       std::to_string(j);
        FluentId nil = out.task.core->fluents.require(prefix + "_nil");
        out.task.initial.set(nil, false);
        for (FluentId f : instruction_fluents(task, *w, i, j))
            out.task.initial.set(f, true);
        out.injected[std::size_t(j)][std::size_t(i)] = *w;
    }
}

} // namespace

CompiledTask inject_dck(const CompiledTask& task,
                        const std::vector<ProcedureDef>& aux) {
    if (aux.empty()) return task;
    if (task.flat)
        throw BadConfigError("flat tasks have no auxiliary procedures");
    if (int(aux.size()) > task.config.procs)
        throw BadConfigError("more procedures than the compilation allows");

    CompiledTask out = task;
    for (std::size_t q = 0; q < aux.size(); ++q)
        inject_procedure(out, task, aux[q], int(q) + 1);
    return out;
}

CompiledTask inject_full_program(const CompiledTask& task,
                                 const PlanningProgram& prog) {
    if (int(prog.procs.size()) != task.config.procs + 1)
        throw BadConfigError("program procedure count differs from task");
    CompiledTask out = task;
    for (std::size_t j = 0; j < prog.procs.size(); ++j)
        inject_procedure(out, task, prog.procs[j], int(j));
    return out;
}

PlanningProgram decode_plan(const Plan& plan, const CompiledTask& task) {
    PlanningProgram prog;
    for (std::size_t j = 0; j < task.config.signatures.size(); ++j) {
        const ProcSignature& sig = task.config.signatures[j];
        ProcedureDef def;
        def.name = sig.name;
        def.params = sig.params;
        def.lines.assign(std::size_t(task.config.line_bound(int(j))) + 1,
                         std::nullopt);
        prog.procs.push_back(std::move(def));
    }
    for (std::size_t j = 0; j < task.injected.size(); ++j)
        for (std::size_t i = 0; i < task.injected[j].size(); ++i)
            if (task.injected[j][i])
                prog.procs[j].lines[i] = task.injected[j][i];

    for (const std::string& step : plan.steps) {
        auto it = task.decode.find(step);
        if (it == task.decode.end()) throw UnknownActionError(step);
        const DecodeEntry& e = it->second;
        if (e.kind != CompiledActionKind::Program) continue;
        auto& cell = prog.procs[std::size_t(e.proc)].lines[std::size_t(e.line)];
        if (cell) {
            if (!(*cell == *e.payload))
                throw Error("two programming actions target line " +
                            std::to_string(e.line) + " of procedure " +
                            std::to_string(e.proc));
            continue;
        }
        cell = e.payload;
    }
    return prog;
}

} // namespace genplan
