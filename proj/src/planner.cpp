#include "genplan/planner.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <queue>
#include <unordered_map>

namespace genplan {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_s(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Node {
    State state;
    long parent;
    int action;
};

Plan extract_plan(const std::vector<Node>& nodes, long goal_index,
                  const ClassicalProblem& p) {
    Plan plan;
    std::vector<long> chain;
    for (long at = goal_index; at >= 0; at = nodes[std::size_t(at)].parent)
        chain.push_back(at);
    std::reverse(chain.begin(), chain.end());
    for (long at : chain) {
        const Node& n = nodes[std::size_t(at)];
        if (n.action >= 0)
            plan.steps.push_back(p.core->actions[std::size_t(n.action)].name);
        plan.trace.push_back(n.state);
    }
    return plan;
}

} // namespace

SolveResult bfs_solve(const ClassicalProblem& p, const SearchLimits& limits) {
    auto start = Clock::now();
    SolveResult res;

    std::vector<Node> nodes;
    std::unordered_map<State, long, StateHash> seen;
    nodes.push_back({p.initial, -1, -1});
    seen.emplace(p.initial, 0);
    res.stats.generated = 1;

    std::deque<long> open{0};
    while (!open.empty()) {
        if (res.stats.expansions >= limits.max_expansions ||
            long(nodes.size()) >= limits.max_states ||
            elapsed_s(start) > limits.max_seconds) {
            res.status = SolveStatus::LimitHit;
            res.stats.seconds = elapsed_s(start);
            return res;
        }
        long cur = open.front();
        open.pop_front();
        if (nodes[std::size_t(cur)].state.satisfies(p.goal)) {
            res.status = SolveStatus::Solved;
            res.plan = extract_plan(nodes, cur, p);
            res.stats.plan_length = int(res.plan.steps.size());
            res.stats.seconds = elapsed_s(start);
            return res;
        }
        ++res.stats.expansions;
        const State cur_state = nodes[std::size_t(cur)].state;
        for (std::size_t ai = 0; ai < p.core->actions.size(); ++ai) {
            const Action& a = p.core->actions[ai];
            if (!applicable(cur_state, a)) continue;
            State succ = apply(cur_state, a);
            auto [it, fresh] = seen.emplace(succ, long(nodes.size()));
            if (!fresh) continue;
            nodes.push_back({std::move(succ), cur, int(ai)});
            open.push_back(it->second);
            ++res.stats.generated;
        }
    }
    res.status = SolveStatus::Unsolvable;
    res.stats.seconds = elapsed_s(start);
    return res;
}

// -- Additive delete-relaxation heuristic --------------------------------------
//
// Every conditional effect C ▷ E of action a becomes a relaxed rule
// pre(a) ∪ C -> E over positive literals; negative literals are treated as
// free. h(s) sums the cheapest rule-chain cost of each positive goal fluent.

namespace {

struct RelaxedRule {
    std::vector<FluentId> pre;  // positive preconditions
    std::vector<FluentId> add;  // positive effects
};

class Relaxation {
public:
    explicit Relaxation(const ClassicalProblem& p) : num_fluents_(p.core->fluents.size()) {
        for (const Action& a : p.core->actions) {
            std::vector<FluentId> base;
            for (Literal l : a.precondition)
                if (l.positive) base.push_back(l.fluent);
            for (const ConditionalEffect& ce : a.effects) {
                RelaxedRule rule;
                rule.pre = base;
                for (Literal l : ce.condition)
                    if (l.positive) rule.pre.push_back(l.fluent);
                for (Literal l : ce.effect)
                    if (l.positive) rule.add.push_back(l.fluent);
                if (rule.add.empty()) continue;
                std::sort(rule.pre.begin(), rule.pre.end());
                rule.pre.erase(std::unique(rule.pre.begin(), rule.pre.end()),
                               rule.pre.end());
                rules_.push_back(std::move(rule));
            }
        }
        consumers_.resize(num_fluents_);
        for (std::size_t r = 0; r < rules_.size(); ++r)
            for (FluentId f : rules_[r].pre)
                consumers_[std::size_t(f)].push_back(int(r));
        is_goal_.assign(num_fluents_, false);
        for (Literal l : p.goal)
            if (l.positive) {
                goal_.push_back(l.fluent);
                is_goal_[std::size_t(l.fluent)] = true;
            }
        cost_.assign(num_fluents_, -1);
        rule_cost_.assign(rules_.size(), 0);
        missing_.assign(rules_.size(), 0);
    }

    // -1 = infinity
    long estimate(const State& s) {
        std::fill(cost_.begin(), cost_.end(), -1L);
        for (std::size_t r = 0; r < rules_.size(); ++r) {
            missing_[r] = int(rules_[r].pre.size());
            rule_cost_[r] = 1;
        }
        using Entry = std::pair<long, FluentId>;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
        for (std::size_t f = 0; f < num_fluents_; ++f)
            if (s.test(FluentId(f))) {
                cost_[f] = 0;
                pq.push({0, FluentId(f)});
            }
        // rules with no positive preconditions fire immediately
        for (std::size_t r = 0; r < rules_.size(); ++r)
            if (missing_[r] == 0) fire(int(r), pq);

        std::size_t goal_left = 0;
        for (FluentId g : goal_)
            if (cost_[std::size_t(g)] != 0) ++goal_left;

        std::vector<bool> settled(num_fluents_, false);
        while (!pq.empty() && goal_left > 0) {
            auto [c, f] = pq.top();
            pq.pop();
            if (c != cost_[std::size_t(f)]) continue; // stale
            if (settled[std::size_t(f)]) continue;
            settled[std::size_t(f)] = true;
            if (is_goal_[std::size_t(f)] && c > 0) --goal_left;
            for (int r : consumers_[std::size_t(f)]) {
                rule_cost_[std::size_t(r)] += c;
                if (--missing_[std::size_t(r)] == 0) fire(r, pq);
            }
        }
        long total = 0;
        for (FluentId g : goal_) {
            long c = cost_[std::size_t(g)];
            if (c < 0) return -1;
            total += c;
        }
        return total;
    }

private:
    template <typename PQ>
    void fire(int r, PQ& pq) {
        long c = rule_cost_[std::size_t(r)];
        for (FluentId f : rules_[std::size_t(r)].add) {
            long& cur = cost_[std::size_t(f)];
            if (cur < 0 || c < cur) {
                cur = c;
                pq.push({c, f});
            }
        }
    }

    std::size_t num_fluents_;
    std::vector<RelaxedRule> rules_;
    std::vector<std::vector<int>> consumers_;
    std::vector<FluentId> goal_;
    std::vector<bool> is_goal_;
    std::vector<long> cost_;
    std::vector<long> rule_cost_;
    std::vector<int> missing_;
};

} // namespace

long relaxation_estimate(const ClassicalProblem& p, const State& s) {
    Relaxation relax(p);
    return relax.estimate(s);
}

SolveResult gbfs_solve(const ClassicalProblem& p, const SearchLimits& limits) {
    auto start = Clock::now();
    SolveResult res;
    Relaxation relax(p);

    std::vector<Node> nodes;
    std::unordered_map<State, long, StateHash> seen;

    struct OpenEntry {
        long h;
        long tick; // insertion order breaks ties
        long node;
        bool operator>(const OpenEntry& o) const {
            return h != o.h ? h > o.h : tick > o.tick;
        }
    };
    std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;

    nodes.push_back({p.initial, -1, -1});
    seen.emplace(p.initial, 0);
    long h0 = relax.estimate(p.initial);
    long tick = 0;
    if (h0 >= 0) open.push({h0, tick++, 0});
    res.stats.generated = 1;

    while (!open.empty()) {
        if (res.stats.expansions >= limits.max_expansions ||
            long(nodes.size()) >= limits.max_states ||
            elapsed_s(start) > limits.max_seconds) {
            res.status = SolveStatus::LimitHit;
            res.stats.seconds = elapsed_s(start);
            return res;
        }
        long cur = open.top().node;
        open.pop();
        if (nodes[std::size_t(cur)].state.satisfies(p.goal)) {
            res.status = SolveStatus::Solved;
            res.plan = extract_plan(nodes, cur, p);
            res.stats.plan_length = int(res.plan.steps.size());
            res.stats.seconds = elapsed_s(start);
            return res;
        }
        ++res.stats.expansions;
        const State cur_state = nodes[std::size_t(cur)].state;
        for (std::size_t ai = 0; ai < p.core->actions.size(); ++ai) {
            const Action& a = p.core->actions[ai];
            if (!applicable(cur_state, a)) continue;
            State succ = apply(cur_state, a);
            auto [it, fresh] = seen.emplace(succ, long(nodes.size()));
            if (!fresh) continue;
            long h = relax.estimate(succ);
            nodes.push_back({std::move(succ), cur, int(ai)});
            ++res.stats.generated;
            if (h < 0) continue; // relaxed-unreachable goal: prune
            open.push({h, tick++, it->second});
        }
    }
    res.status = SolveStatus::Unsolvable;
    res.stats.seconds = elapsed_s(start);
    return res;
}

// -- Program enumerator ----------------------------------------------------------

bool enumerate_programs(const GeneralizedProblem& gp, int n,
                        const std::vector<int>& action_pool,
                        const std::vector<FluentId>& condition_pool,
                        const ExecLimits& run_limits,
                        const std::function<bool(const PlanningProgram&)>& on_solution,
                        EnumStats* stats) {
    if (n < 1) throw BadConfigError("enumerate_programs requires n >= 1");

    for (int end_line = 1; end_line <= n; ++end_line) {
        // Candidate instructions for one line: actions first, then gotos with
        // ascending targets (the end line is a legal target, self is not).
        auto candidates = [&](int line) {
            std::vector<Instruction> cands;
            for (int a : action_pool) cands.push_back(Instruction::act(a));
            for (int target = 0; target <= end_line; ++target) {
                if (target == line) continue;
                for (FluentId f : condition_pool)
                    cands.push_back(Instruction::jump(target, f));
            }
            return cands;
        };

        PlanningProgram prog;
        prog.procs.emplace_back();
        prog.procs[0].name = "main";
        prog.procs[0].lines.assign(std::size_t(end_line) + 1, std::nullopt);
        prog.procs[0].lines[std::size_t(end_line)] = Instruction::end();

        std::vector<std::vector<Instruction>> cands;
        for (int i = 0; i < end_line; ++i) cands.push_back(candidates(i));
        bool feasible = true;
        for (const auto& c : cands)
            if (c.empty()) feasible = false;
        if (!feasible) continue;

        std::vector<std::size_t> pick(std::size_t(end_line), 0);
        while (true) {
            for (int i = 0; i < end_line; ++i)
                prog.procs[0].lines[std::size_t(i)] =
                    cands[std::size_t(i)][pick[std::size_t(i)]];
            if (stats) ++stats->programs;
            if (solves(prog, gp, run_limits).solved) {
                if (stats) ++stats->solutions;
                if (!on_solution(prog)) return false;
            }
            // next combination, last line varying fastest
            int at = end_line - 1;
            while (at >= 0) {
                if (++pick[std::size_t(at)] < cands[std::size_t(at)].size())
                    break;
                pick[std::size_t(at)] = 0;
                --at;
            }
            if (at < 0) break;
        }
    }
    return true;
}

} // namespace genplan
