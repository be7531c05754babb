// Acceptance suite: one check per headline property, each printed as a
// single pass/fail line. Exits nonzero if any check fails.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <vector>

#include "genplan/compile.hpp"
#include "genplan/domains.hpp"
#include "genplan/pddl.hpp"
#include "genplan/planner.hpp"
#include "genplan/program.hpp"
#include "genplan/synth.hpp"
#include "support/helpers.hpp"

using namespace genplan;
using namespace genplan::testsupport;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_s(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.str().empty()) detail << "; ";
            detail << what;
        }
    }
};

const char* kGridProgram =
    "proc main {\n"
    " 0. dec_x\n 1. goto(0, !(x_eq_0))\n 2. dec_y\n 3. goto(2, !(y_eq_0))\n"
    " 4. end\n}\n";

const char* kHallProgram = R"(
proc main {
  0. call p1(x)
  1. call p1(y)
  2. call p2(x)
  3. call p2(y)
  4. call p1(x)
  5. end
}
proc p1(aux: axis) {
  0. dec_aux
  1. goto(0, !(aux_eq_0))
  2. end
}
proc p2(aux: axis) {
  0. inc_aux
  1. goto(0, !(aux_eq_n))
  2. end
}
)";

const char* kListProgram =
    "proc main {\n"
    " 0. visit\n 1. goto(3, !(cur_is_tail))\n 2. end\n 3. next\n"
    " 4. call main\n 5. end\n}\n";

const char* kTreeProgram = R"(
proc main {
  0. call p1(root)
  1. end
}
proc p1(current: node) {
  0. goto(6, !(cur_fresh))
  1. visit
  2. left
  3. call p1(child)
  4. right
  5. call p1(child)
  6. end
}
)";

const char* kSortProgram = R"(
proc main {
  0. call p1
  1. swap_i_k
  2. inc_i
  3. goto(0, !(i_eq_n))
  4. end
}
proc p1 {
  0. inc_j
  1. goto(3, !(vj_lt_vk))
  2. assign_k_j
  3. goto(0, !(j_eq_n))
  4. end
}
)";

// ---------------------------------------------------------------------------

void interpreter_correctness(Check& c) {
    auto start = Clock::now();

    std::vector<std::pair<int, int>> all_cells;
    for (int x = 0; x < 5; ++x)
        for (int y = 0; y < 5; ++y) all_cells.emplace_back(x, y);
    DomainRecipe grid = make_grid_to_origin(5, 5, all_cells);
    PlanningProgram fig2 = parse_program(kGridProgram, *grid.gp.core);
    SolveReport grid_rep = solves(fig2, grid.gp, {});
    c.expect(grid_rep.solved, "grid program failed a 5x5 start");
    c.expect(grid_rep.instances.size() == 25, "expected 25 grid starts");

    for (int n : {2, 4}) { // 3x3 and 5x5 grids
        DomainRecipe hall =
            make_hall_a(n, {{1, 1}, {n, 0}, {0, n - 1}, {n - 1, n}});
        PlanningProgram fig4 = parse_program(kHallProgram, *hall.gp.core);
        SolveReport rep = solves(fig4, hall.gp, {});
        c.expect(rep.solved,
                 "hall-a program failed on the " + std::to_string(n + 1) +
                     "x" + std::to_string(n + 1) + " grid");
    }
    double took = elapsed_s(start);
    c.expect(took < 1.0, "interpreter runs took " + std::to_string(took) + "s");
}

void flat_semantics_equivalence(Check& c) {
    MiniCore mc = mini_core({"a", "b", "c"});
    mc.core->add_action(
        mk_action("set_a", {}, {{LiteralSet{}, LiteralSet{pos(mc["a"])}}}));
    mc.core->add_action(
        mk_action("flip_b", {},
                  {{LiteralSet{pos(mc["b"])}, LiteralSet{neg(mc["b"])}},
                   {LiteralSet{neg(mc["b"])}, LiteralSet{pos(mc["b"])}}}));
    mc.core->add_action(mk_action(
        "c_if_a", {}, {{LiteralSet{pos(mc["a"])}, LiteralSet{pos(mc["c"])}}}));
    mc.core->add_action(mk_action("gated", {pos(mc["c"])},
                                  {{LiteralSet{}, LiteralSet{neg(mc["a"])}}}));
    std::vector<int> actions{0, 1, 2, 3};
    std::vector<FluentId> conds{mc["a"], mc["b"], mc["c"]};

    Rng rng(20260808);
    int agreements = 0;
    for (int round = 0; round < 200; ++round) {
        PlanningProgram prog = random_flat_program(rng, 5, actions, conds);
        State init(mc.core->fluents.size());
        if (rng.flip()) init.set(mc["b"], true);
        if (rng.flip()) init.set(mc["a"], true);
        ClassicalProblem p{mc.core, init, LiteralSet{pos(mc["c"])}};

        FlatResult ref = run_flat_reference(prog, p);
        RunOutcome out = run_program(prog, p, {});
        bool same =
            (ref.status == FlatResult::Status::Solved &&
             out.status == RunStatus::Terminated &&
             out.final_state == ref.final_state) ||
            (ref.status == FlatResult::Status::LoopFail &&
             out.status == RunStatus::FailedLoop) ||
            (ref.status == FlatResult::Status::ErrorFail &&
             out.status == RunStatus::FailedError);
        same = same && out.steps == ref.steps;
        if (same) ++agreements;
    }
    c.expect(agreements == 200, "only " + std::to_string(agreements) +
                                    "/200 programs agreed");
}

void compilation_soundness(Check& c) {
    DomainRecipe grid2 = make_grid_to_origin(3, 3, {{1, 0}, {2, 1}});
    DomainRecipe grid1 = make_grid_to_origin(3, 3, {{2, 2}});
    DomainRecipe sum = make_summatory({2, 3}); // goals up to y = 6
    std::vector<const GeneralizedProblem*> gps{&grid2.gp, &grid1.gp, &sum.gp};

    int plans_checked = 0, failures = 0;
    for (const GeneralizedProblem* gp : gps)
        for (int n : {1, 2, 3})
            for (bool split : {false, true})
                for (bool use_bfs : {true, false}) {
                    CompiledTask task =
                        compile_flat(*gp, n, gp->condition_pool, split);
                    SolveResult res = use_bfs ? bfs_solve(task.task)
                                              : gbfs_solve(task.task);
                    if (!res.solved()) continue;
                    ++plans_checked;
                    PlanningProgram prog = decode_plan(res.plan, task);
                    if (!solves(prog, *gp, {}).solved) ++failures;
                }
    c.expect(plans_checked >= 12,
             "only " + std::to_string(plans_checked) + " plans found");
    c.expect(failures == 0,
             std::to_string(failures) + " decoded programs failed (of " +
                 std::to_string(plans_checked) + ")");
}

// Lines 0..L-1 filled, a single end at L, nothing after: the canonical shape
// the enumerator generates.
std::optional<std::vector<Instruction>> canonical_lines(const ProcedureDef& p) {
    int end_at = -1;
    for (std::size_t i = 0; i < p.lines.size(); ++i) {
        if (!p.lines[i]) continue;
        if (p.lines[i]->kind == Instruction::Kind::End) {
            if (end_at >= 0) return std::nullopt;
            end_at = int(i);
        }
    }
    if (end_at < 1) return std::nullopt;
    std::vector<Instruction> out;
    for (int i = 0; i < end_at; ++i) {
        if (!p.lines[std::size_t(i)]) return std::nullopt;
        out.push_back(*p.lines[std::size_t(i)]);
    }
    for (std::size_t i = std::size_t(end_at) + 1; i < p.lines.size(); ++i)
        if (p.lines[i]) return std::nullopt;
    out.push_back(Instruction::end());
    return out;
}

void compilation_completeness(Check& c) {
    struct Config {
        GeneralizedProblem gp;
        std::vector<FluentId> pool;
        int n;
    };
    std::vector<Config> configs;

    std::vector<std::vector<std::pair<int, int>>> start_sets{
        {{1, 0}}, {{0, 1}}, {{1, 1}}, {{2, 1}}, {{1, 0}, {0, 1}}};
    for (const auto& starts : start_sets) {
        DomainRecipe grid = make_grid_to_origin(3, 3, starts);
        std::vector<FluentId> full = grid.gp.condition_pool;
        std::vector<FluentId> xonly{full[0]};
        for (int n : {1, 2, 3}) {
            configs.push_back({grid.gp, full, n});
            configs.push_back({grid.gp, xonly, n});
        }
    }
    DomainRecipe sum = make_summatory({2});
    for (int n : {2, 3}) configs.push_back({sum.gp, sum.gp.condition_pool, n});

    int agreed = 0, member_failures = 0;
    for (const Config& cfg : configs) {
        std::vector<int> actions;
        for (std::size_t a = 0; a < cfg.gp.core->actions.size(); ++a)
            actions.push_back(int(a));

        std::vector<std::vector<Instruction>> solutions;
        enumerate_programs(cfg.gp, cfg.n, actions, cfg.pool, {},
                           [&](const PlanningProgram& prog) {
                               std::vector<Instruction> lines;
                               for (const auto& l : prog.procs[0].lines)
                                   lines.push_back(*l);
                               solutions.push_back(std::move(lines));
                               return true;
                           });

        CompiledTask task = compile_flat(cfg.gp, cfg.n, cfg.pool, true);
        SolveResult res = bfs_solve(task.task);
        bool planner_solves = res.solved();
        bool enumerator_solves = !solutions.empty();
        if (planner_solves != enumerator_solves) {
            c.expect(false, "solvability disagreement at n=" +
                                std::to_string(cfg.n));
            continue;
        }
        ++agreed;
        if (!planner_solves) continue;

        PlanningProgram prog = decode_plan(res.plan, task);
        auto canon = canonical_lines(prog.procs[0]);
        bool member = false;
        if (canon)
            for (const auto& sol : solutions)
                if (sol == *canon) {
                    member = true;
                    break;
                }
        if (!member) ++member_failures;
    }
    c.expect(agreed >= 20, "only " + std::to_string(agreed) +
                               " configurations agreed");
    c.expect(member_failures == 0,
             std::to_string(member_failures) +
                 " decoded programs outside the enumerated solution set");
}

void action_count_formulas(Check& c) {
    DomainRecipe grid = make_grid_to_origin(5, 5, {{2, 1}});
    std::vector<FluentId> all_fluents;
    for (std::size_t f = 0; f < grid.gp.core->fluents.size(); ++f)
        all_fluents.push_back(FluentId(f));

    for (int pool_size : {2, 8}) {
        std::vector<FluentId> pool(all_fluents.begin(),
                                   all_fluents.begin() + pool_size);
        for (int n : {2, 5, 10}) {
            CompiledTask whole = compile_flat(grid.gp, n, pool, false);
            long want_whole = long(pool_size) * n * n;
            c.expect(whole.goto_machinery_count() == want_whole,
                     "whole-goto count off at n=" + std::to_string(n) +
                         " |pool|=" + std::to_string(pool_size));
            CompiledTask split = compile_flat(grid.gp, n, pool, true);
            long want_split = long(pool_size + n) * n;
            c.expect(split.goto_machinery_count() == want_split,
                     "split count off at n=" + std::to_string(n) +
                         " |pool|=" + std::to_string(pool_size));
        }
    }
}

void synthesis_reproduction(Check& c) {
    auto start = Clock::now();
    DomainRecipe train = make_summatory({2, 3});
    SynthRequest req;
    req.gp = train.gp;
    req.holdout = make_summatory({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}).gp;
    req.cfg.lines = 3;
    req.cfg.split = true;
    req.cfg.condition_pool = train.gp.condition_pool;
    req.limits.max_seconds = 120;

    SynthOutcome out = synthesize(req);
    double took = elapsed_s(start);
    c.expect(out.status == SynthStatus::Solved,
             "synthesis did not solve: " + out.detail);
    if (out.status == SynthStatus::Solved) {
        c.expect(out.used_lines == 3,
                 "expected a 3-line program, got " +
                     std::to_string(out.used_lines));
        c.expect(classify_program(out.program) == SolutionKind::OP,
                 "expected a one-procedure program");
    }
    c.expect(took < 120.0, "took " + std::to_string(took) + "s");
}

void recursion(Check& c) {
    // five-line recursive list program on lengths 1..20 with depth bound 25
    std::vector<int> lengths;
    for (int len = 1; len <= 20; ++len) lengths.push_back(len);
    DomainRecipe list = make_list_visit(lengths);
    PlanningProgram list_prog = parse_program(kListProgram, *list.gp.core);
    ExecLimits list_limits;
    list_limits.max_depth = 25;
    c.expect(solves(list_prog, list.gp, list_limits).solved,
             "list program failed a length in 1..20");
    c.expect(classify_program(list_prog) == SolutionKind::R,
             "list program not classified recursive");

    // six-line recursive parameterized tree program on 20 random trees
    Rng rng(411);
    std::vector<TreeShape> trees;
    for (int t = 0; t < 20; ++t) {
        TreeShape shape;
        shape.children.push_back({-1, -1});
        std::vector<int> leaves{0};
        int target = 1 + rng.below(15);
        while (int(shape.children.size()) + 2 <= target) {
            int pick = rng.below(int(leaves.size()));
            int node = leaves[std::size_t(pick)];
            leaves.erase(leaves.begin() + pick);
            int l = int(shape.children.size());
            shape.children.push_back({-1, -1});
            int r = int(shape.children.size());
            shape.children.push_back({-1, -1});
            shape.children[std::size_t(node)] = {l, r};
            leaves.push_back(l);
            leaves.push_back(r);
        }
        trees.push_back(std::move(shape));
    }
    DomainRecipe tree = make_tree_dfs(trees);
    PlanningProgram tree_prog = parse_program(kTreeProgram, *tree.gp.core);
    int tree_lines = int(tree_prog.procs[1].lines.size()) - 1;
    c.expect(tree_lines == 6, "tree procedure has " +
                                  std::to_string(tree_lines) + " lines");
    ExecLimits tree_limits;
    tree_limits.max_depth = 20;
    c.expect(solves(tree_prog, tree.gp, tree_limits).solved,
             "tree program failed one of the 20 trees");
    c.expect(classify_program(tree_prog) == SolutionKind::RP,
             "tree program not classified recursive-parameterized");

    // the list procedure as control knowledge: a two-line main is found
    auto start = Clock::now();
    DomainRecipe train = make_list_visit({1, 2, 3, 4, 5, 6});
    PlanningProgram dck = parse_program(
        "proc main {\n 0. call p1\n 1. end\n}\n"
        "proc p1 {\n 0. visit\n 1. goto(3, !(cur_is_tail))\n 2. end\n"
        " 3. next\n 4. call p1\n 5. end\n}\n",
        *train.gp.core);
    SynthRequest req;
    req.gp = train.gp;
    req.cfg.lines = 2; // main's bound; the procedure keeps its five lines
    req.cfg.procs = 1;
    req.cfg.stack = 9;
    req.cfg.condition_pool = {};
    req.cfg.signatures = {{"main", {}}, {"p1", {}}};
    req.dck = {dck.procs[1]};
    req.run_limits.max_depth = 9;
    req.limits.max_seconds = 120;
    SynthOutcome out = synthesize(req);
    double took = elapsed_s(start);
    c.expect(out.status == SynthStatus::Solved,
             "main synthesis with list DCK failed: " + out.detail);
    if (out.status == SynthStatus::Solved) {
        c.expect(out.used_lines <= 2, "main used " +
                                          std::to_string(out.used_lines) +
                                          " lines");
        bool calls = false;
        for (const auto& line : out.program.procs[0].lines)
            if (line && line->kind == Instruction::Kind::Call &&
                line->callee == 1)
                calls = true;
        c.expect(calls, "main does not call the injected procedure");
    }
    c.expect(took < 120.0, "DCK synthesis took " + std::to_string(took) + "s");
}

void pipeline_sorting(Check& c) {
    double budget = 3600.0;
    if (const char* env = std::getenv("GENPLAN_SORT_BUDGET"))
        budget = std::atof(env);

    // verification workload: 50 random lists of length <= 6
    Rng rng(512);
    std::vector<std::vector<int>> lists;
    for (int t = 0; t < 50; ++t) {
        int len = 1 + rng.below(6);
        std::vector<int> l;
        for (int q = 0; q < len; ++q) l.push_back(1 + rng.below(6));
        lists.push_back(std::move(l));
    }
    DomainRecipe verify = make_sorting(lists);

    DomainRecipe train = make_sorting({{2, 1}, {3, 1, 2}, {2, 4, 1, 3}});
    PipelineRequest req;
    req.recipe = train;
    req.main_lines = 4;
    req.subtask_lines = 4;
    req.stack = 2;
    req.limits.max_seconds = budget;
    req.main_limits.max_seconds = budget;
    PipelineOutcome out = run_pipeline(req);

    if (out.solved) {
        for (const BenchRow& row : out.report.rows)
            c.expect(row.lines <= 4, row.procedure + " used " +
                                         std::to_string(row.lines) + " lines");
        PlanningProgram rebound =
            rebind_program(out.program, *train.gp.core, *verify.gp.core);
        c.expect(solves(rebound, verify.gp, {}).solved,
                 "pipeline program failed one of the 50 random lists");
        std::cout << "    (pipeline path: procedure and main synthesized)\n";
        return;
    }

    // fallback: the hand-encoded selection sort at the published line counts
    // must pass, and the fully injected task must be solved by execution
    // actions alone
    std::cout << "    (fallback path: planner exceeded the budget at stage "
              << out.failed_stage << ")\n";
    PlanningProgram hand = parse_program(kSortProgram, *train.gp.core);
    PlanningProgram rebound =
        rebind_program(hand, *train.gp.core, *verify.gp.core);
    c.expect(solves(rebound, verify.gp, {}).solved,
             "hand-encoded selection sort failed a random list");

    CompilationConfig cfg;
    cfg.lines = 4;
    cfg.procs = 1;
    cfg.stack = 2;
    cfg.split = true;
    cfg.condition_pool = train.gp.condition_pool;
    cfg.extra_condition_pool = train.subtasks->subtasks[0].gp.condition_pool;
    cfg.signatures = {{"main", {}}, {"p1", {}}};
    CompiledTask task = compile_nested(train.gp, cfg);
    CompiledTask injected = inject_full_program(task, hand);
    SolveResult res = gbfs_solve(injected.task);
    c.expect(res.solved(), "fully injected sorting task not solved");
    if (res.solved())
        for (const std::string& step : res.plan.steps)
            c.expect(injected.decode.at(step).kind !=
                         CompiledActionKind::Program,
                     "programming action in a fully injected task");
}

void pddl_round_trip_and_adapter(Check& c) {
    // ten compiled tasks of assorted shapes
    std::vector<CompiledTask> tasks;
    DomainRecipe grid = make_grid_to_origin(3, 3, {{1, 0}, {2, 1}});
    for (int n : {1, 2, 3})
        for (bool split : {false, true})
            tasks.push_back(compile_flat(grid.gp, n, grid.gp.condition_pool,
                                         split));
    DomainRecipe sum = make_summatory({2, 3});
    tasks.push_back(compile_flat(sum.gp, 3, sum.gp.condition_pool, true));
    DomainRecipe hall = make_hall_a(2, {{1, 1}});
    int aux_var = hall.gp.core->variable_index("aux");
    CompilationConfig hcfg;
    hcfg.lines = 2;
    hcfg.procs = 2;
    hcfg.stack = 2;
    hcfg.condition_pool = hall.gp.condition_pool;
    hcfg.signatures = {{"main", {}},
                       {"p1", {{"axis", aux_var}}},
                       {"p2", {{"axis", aux_var}}}};
    tasks.push_back(compile_nested(hall.gp, hcfg));
    DomainRecipe list = make_list_visit({1, 2});
    CompilationConfig lcfg;
    lcfg.lines = 5;
    lcfg.procs = 0;
    lcfg.stack = 3;
    lcfg.condition_pool = list.gp.condition_pool;
    tasks.push_back(compile_nested(list.gp, lcfg));
    CompilationConfig l1 = lcfg;
    l1.stack = 2;
    l1.split = false;
    tasks.push_back(compile_nested(list.gp, l1));
    c.expect(tasks.size() == 10, "expected 10 tasks");

    for (const CompiledTask& t : tasks) {
        PddlPair one = emit_pddl(t.task);
        ClassicalProblem back = parse_pddl(one.domain_text, one.problem_text);
        PddlPair two = emit_pddl(back);
        c.expect(one.domain_text == two.domain_text &&
                     one.problem_text == two.problem_text,
                 "emit/parse/emit not a fixed point");
        c.expect(back.core->fluents.size() == t.task.core->fluents.size() &&
                     back.core->actions.size() == t.task.core->actions.size(),
                 "round trip changed the problem size");
    }

    // the toolkit's own CLI as the external planner, deterministic oracle on
    // both sides
    std::string cli = GENPLAN_CLI_PATH;
    PlannerCommand cmd{cli + " self-solve --bfs {domain} {problem} {plan}",
                       300.0, ""};
    int reproduced = 0;
    std::vector<CompiledTask> micro;
    micro.push_back(compile_flat(grid.gp, 3, grid.gp.condition_pool, true));
    DomainRecipe grid1 = make_grid_to_origin(3, 3, {{2, 2}});
    micro.push_back(compile_flat(grid1.gp, 3, grid1.gp.condition_pool, true));
    micro.push_back(compile_flat(sum.gp, 3, sum.gp.condition_pool, true));
    for (const CompiledTask& t : micro) {
        ExternalResult ext = solve_external(t.task, cmd);
        if (ext.kind != ExternalResult::Kind::Ok) {
            c.expect(false, "adapter run failed: " + ext.detail);
            continue;
        }
        SolveResult internal = bfs_solve(t.task);
        if (!internal.solved()) {
            c.expect(false, "internal oracle failed");
            continue;
        }
        PlanningProgram a = decode_plan(ext.plan, t);
        PlanningProgram b = decode_plan(internal.plan, t);
        bool same = a.procs.size() == b.procs.size();
        for (std::size_t j = 0; same && j < a.procs.size(); ++j)
            same = a.procs[j].lines == b.procs[j].lines;
        if (same) ++reproduced;
        c.expect(same, "external and internal programs differ");
    }
    c.expect(reproduced == 3, "reproduced " + std::to_string(reproduced) +
                                  "/3 programs");
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<void(Check&)> run;
    };
    std::vector<Criterion> criteria{
        {"interpreter-correctness", interpreter_correctness},
        {"flat-semantics-equivalence", flat_semantics_equivalence},
        {"compilation-soundness", compilation_soundness},
        {"compilation-completeness", compilation_completeness},
        {"action-count-formulas", action_count_formulas},
        {"synthesis-reproduction", synthesis_reproduction},
        {"recursion", recursion},
        {"pipeline-dck-sorting", pipeline_sorting},
        {"pddl-round-trip-adapter", pddl_round_trip_and_adapter},
    };

    int failed = 0;
    for (const Criterion& cr : criteria) {
        auto start = Clock::now();
        Check check;
        try {
            cr.run(check);
        } catch (const std::exception& e) {
            check.ok = false;
            check.detail << "exception: " << e.what();
        }
        double took = elapsed_s(start);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1f", took);
        std::cout << (check.ok ? "[PASS] " : "[FAIL] ") << cr.name << " ("
                  << buf << "s)";
        if (!check.ok) std::cout << " - " << check.detail.str();
        std::cout << "\n" << std::flush;
        if (!check.ok) ++failed;
    }
    if (failed) {
        std::cout << failed << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
