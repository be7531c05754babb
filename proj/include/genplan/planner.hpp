#pragma once

// Internal classical planner: a complete breadth-first oracle, a greedy
// best-first search guided by an additive delete-relaxation heuristic, and a
// brute-force enumerator of flat planning programs used as an independent
// correctness oracle.

#include <functional>

#include "genplan/model.hpp"
#include "genplan/program.hpp"

namespace genplan {

struct SearchLimits {
    long max_expansions = 50'000'000;
    double max_seconds = 600.0;
    long max_states = 20'000'000;
};

struct SearchStats {
    long expansions = 0;
    long generated = 0;
    int plan_length = -1; // set iff solved
    double seconds = 0.0;
};

enum class SolveStatus { Solved, Unsolvable, LimitHit };

struct SolveResult {
    SolveStatus status = SolveStatus::LimitHit;
    Plan plan;
    SearchStats stats;

    bool solved() const { return status == SolveStatus::Solved; }
};

// Complete uniform search; returns a shortest plan when one exists within
// the limits, Unsolvable only after exhausting the reachable space.
SolveResult bfs_solve(const ClassicalProblem& p, const SearchLimits& limits = {});

// Greedy best-first search on the additive delete-relaxation estimate, each
// conditional effect relaxed to an independent rule pre ∪ C -> E. Satisficing;
// complete on finite graphs thanks to duplicate detection.
SolveResult gbfs_solve(const ClassicalProblem& p, const SearchLimits& limits = {});

// Heuristic value of a state (exposed for tests). -1 encodes infinity.
long relaxation_estimate(const ClassicalProblem& p, const State& s);

struct EnumStats {
    long programs = 0;  // syntactically generated candidates
    long solutions = 0;
};

// Enumerates flat programs (no procedures) in canonical order: end line
// L = 1..n, lines 0..L-1 filled left to right, action instructions before
// gotos, goto targets ascending (self-targets excluded, targets may point at
// the end line). Programs are filtered by `solves`; the callback returns
// false to stop early. Returns false when stopped early.
bool enumerate_programs(const GeneralizedProblem& gp, int n,
                        const std::vector<int>& action_pool,
                        const std::vector<FluentId>& condition_pool,
                        const ExecLimits& run_limits,
                        const std::function<bool(const PlanningProgram&)>& on_solution,
                        EnumStats* stats = nullptr);

} // namespace genplan
