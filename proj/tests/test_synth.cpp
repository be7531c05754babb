#include <doctest.h>

#include "genplan/domains.hpp"
#include "genplan/program.hpp"
#include "genplan/synth.hpp"
#include "support/helpers.hpp"

using namespace genplan;
using namespace genplan::testsupport;

TEST_CASE("summatory synthesis: three lines from two instances") {
    DomainRecipe train = make_summatory({2, 3});
    SynthRequest req;
    req.gp = train.gp;
    req.holdout = make_summatory({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}).gp;
    req.cfg.lines = 3;
    req.cfg.split = true;
    req.cfg.condition_pool = train.gp.condition_pool;
    req.limits.max_seconds = 120;

    SynthOutcome out = synthesize(req);
    REQUIRE(out.status == SynthStatus::Solved);
    CHECK(out.used_lines == 3);
    CHECK(classify_program(out.program) == SolutionKind::OP);
    CHECK(solves(out.program, train.gp, {}).solved);
}

TEST_CASE("unsatisfiable bounds surface as unsolvable") {
    DomainRecipe train = make_summatory({2, 3});
    SynthRequest req;
    req.gp = train.gp;
    req.cfg.lines = 1;
    req.cfg.condition_pool = train.gp.condition_pool;
    req.use_bfs = true;
    SynthOutcome out = synthesize(req);
    CHECK(out.status == SynthStatus::Unsolvable);
}

TEST_CASE("recursive list procedure as control knowledge") {
    // lists long enough that no straight-line main fits the bound
    DomainRecipe list = make_list_visit({1, 3, 5});
    // same recursion, but self-contained as procedure p1
    PlanningProgram dck = parse_program(R"(
proc main {
  0. call p1
  1. end
}
proc p1 {
  0. visit
  1. goto(3, !(cur_is_tail))
  2. end
  3. next
  4. call p1
  5. end
}
)",
                                        *list.gp.core);
    SynthRequest req;
    req.gp = list.gp;
    req.cfg.lines = 2; // bound for main; p1 keeps its own five lines
    req.cfg.procs = 1;
    req.cfg.stack = 8;
    req.cfg.condition_pool = {};
    req.cfg.signatures = {{"main", {}}, {"p1", {}}};
    req.dck = {dck.procs[1]};
    req.run_limits.max_depth = 8;
    req.limits.max_seconds = 120;
    req.use_bfs = true; // the complete oracle returns the shortest plan,
                        // which programs the fewest main lines here

    SynthOutcome out = synthesize(req);
    REQUIRE(out.status == SynthStatus::Solved);
    CHECK(out.used_lines <= 2);
    REQUIRE(out.program.procs[0].lines[0].has_value());
    CHECK(out.program.procs[0].lines[0]->kind == Instruction::Kind::Call);
    CHECK(classify_program(out.program) == SolutionKind::R);
}

TEST_CASE("pipeline: hall-a procedures are synthesized then composed") {
    DomainRecipe hall = make_hall_a(2, {{1, 1}, {2, 0}});
    PipelineRequest req;
    req.recipe = hall;
    req.main_lines = 5;
    req.subtask_lines = 2;
    req.main_condition_pool = std::vector<FluentId>{};
    req.stack = 2;
    req.limits.max_seconds = 60;
    req.main_limits.max_seconds = 300;
    req.run_limits.max_depth = 4;

    PipelineOutcome out = run_pipeline(req);
    REQUIRE(out.solved);
    CHECK(out.report.rows.size() == 3); // main + two procedures

    // concurrent and sequential subtask synthesis give the same program
    req.concurrent_subtasks = false;
    PipelineOutcome seq = run_pipeline(req);
    REQUIRE(seq.solved);
    for (std::size_t j = 0; j < out.program.procs.size(); ++j)
        CHECK(seq.program.procs[j].lines == out.program.procs[j].lines);
    CHECK(solves(out.program, hall.gp, {4, 100000, false}).solved);
    CHECK(out.report.kind == SolutionKind::NP);
    // procedures came out at the expected size
    for (const BenchRow& row : out.report.rows)
        if (row.procedure != "main") CHECK(row.lines <= 2);
}

TEST_CASE("reverse synthesis finds the four-line swap loop") {
    DomainRecipe rev = make_domain("reverse", {});
    SynthRequest req;
    req.gp = rev.gp;
    req.holdout = rev.holdout;
    req.cfg.lines = 4;
    req.cfg.condition_pool = rev.gp.condition_pool;
    req.limits.max_seconds = 300;
    SynthOutcome out = synthesize(req);
    REQUIRE(out.status == SynthStatus::Solved);
    CHECK(out.used_lines == 4);
    CHECK(classify_program(out.program) == SolutionKind::OP);
}

TEST_CASE("weak training sets are caught by held-out verification") {
    // both lists reverse with one swap, so a one-line program passes
    // training and the held-out instances expose it
    DomainRecipe rev = make_reverse({{3, 1}, {2, 3, 1}});
    SynthRequest req;
    req.gp = rev.gp;
    req.holdout = make_reverse({{4, 2, 3, 1}}).gp;
    req.cfg.lines = 4;
    req.cfg.condition_pool = rev.gp.condition_pool;
    req.limits.max_seconds = 300;
    SynthOutcome out = synthesize(req);
    CHECK(out.status == SynthStatus::VerificationFailed);
    CHECK(out.detail.find("held-out") != std::string::npos);
}

TEST_CASE("pipeline without a decomposition is rejected") {
    DomainRecipe sum = make_summatory({2, 3});
    PipelineRequest req;
    req.recipe = sum;
    CHECK_THROWS_AS(run_pipeline(req), BadConfigError);
}

TEST_CASE("rebinding reports missing names") {
    DomainRecipe a = make_summatory({2, 3});
    DomainRecipe b = make_grid_to_origin(3, 3, {{1, 1}});
    PlanningProgram prog = parse_program(
        "proc main {\n 0. add_y_n\n 1. end\n}\n", *a.gp.core);
    CHECK_THROWS_AS(rebind_program(prog, *a.gp.core, *b.gp.core), Error);
}

TEST_CASE("solution kind classification") {
    DomainRecipe grid = make_grid_to_origin(3, 3, {{1, 1}});
    PlanningProgram op = parse_program(
        "proc main {\n 0. dec_x\n 1. end\n}\n", *grid.gp.core);
    CHECK(classify_program(op) == SolutionKind::OP);

    DomainRecipe list = make_list_visit({2});
    PlanningProgram rec = parse_program(
        "proc main {\n 0. visit\n 1. goto(3, !(cur_is_tail))\n 2. end\n"
        " 3. next\n 4. call main\n 5. end\n}\n",
        *list.gp.core);
    CHECK(classify_program(rec) == SolutionKind::R);

    DomainRecipe tree = make_tree_dfs({TreeShape{{{1, 2}, {-1, -1}, {-1, -1}}}});
    PlanningProgram rp = parse_program(R"(
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
)",
                                       *tree.gp.core);
    CHECK(classify_program(rp) == SolutionKind::RP);
}

TEST_CASE("parameterized programs rebind across cores") {
    DomainRecipe small = make_tree_dfs({TreeShape{{{1, 2}, {-1, -1}, {-1, -1}}}});
    TreeShape big;
    big.children = {{1, 2}, {3, 4}, {5, 6}, {-1, -1}, {-1, -1}, {-1, -1}, {-1, -1}};
    DomainRecipe bigger = make_tree_dfs({big});
    PlanningProgram prog = parse_program(R"(
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
)",
                                         *small.gp.core);
    PlanningProgram rebound =
        rebind_program(prog, *small.gp.core, *bigger.gp.core);
    ExecLimits limits;
    limits.max_depth = 10;
    CHECK(solves(rebound, bigger.gp, limits).solved);
}

TEST_CASE("pipeline: grid navigation splits into column and row procedures") {
    DomainRecipe nav = make_grid_nav(
        5, 5, {{3, 2, 0, 0}, {1, 4, 4, 1}, {0, 0, 3, 4}, {4, 1, 1, 3}});
    PipelineRequest req;
    req.recipe = nav;
    req.main_lines = 2;
    req.subtask_lines = 5;
    req.main_condition_pool = std::vector<FluentId>{};
    req.stack = 2;
    req.limits.max_seconds = 300;
    req.main_limits.max_seconds = 300;
    PipelineOutcome out = run_pipeline(req);
    REQUIRE(out.solved);
    CHECK(solves(out.program, nav.gp, {}).solved);
    CHECK(out.report.rows[0].procedure == "main");
    CHECK(out.report.rows[0].lines <= 2);
}

TEST_CASE("fibonacci synthesis finds a five-line update loop") {
    DomainRecipe fib = make_fibonacci({4, 5});
    SynthRequest req;
    req.gp = fib.gp;
    req.holdout = make_fibonacci({2, 3, 4, 5, 6, 7}).gp;
    req.cfg.lines = 5;
    req.cfg.condition_pool = fib.gp.condition_pool;
    req.limits.max_seconds = 300;
    SynthOutcome out = synthesize(req);
    REQUIRE(out.status == SynthStatus::Solved);
    CHECK(out.used_lines == 5);
    CHECK(classify_program(out.program) == SolutionKind::OP);
}
