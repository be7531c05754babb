#include "genplan/domains.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <functional>
#include <set>
#include <sstream>

namespace genplan {

namespace {

// -- Integer-variable encoding -------------------------------------------------

struct Expr {
    enum Kind { Const, Of, IncOf, DecOf, AddOf, IncOfMin } kind = Const;
    int a = -1; // source variable
    int b = -1; // second source (AddOf, IncOfMin cap)
    int c = 0;  // Const

    static Expr constant(int c) { return {Const, -1, -1, c}; }
    static Expr of(int v) { return {Of, v, -1, 0}; }
    static Expr inc(int v) { return {IncOf, v, -1, 0}; }
    static Expr dec(int v) { return {DecOf, v, -1, 0}; }
    static Expr add(int v, int w) { return {AddOf, v, w, 0}; }
    static Expr inc_capped(int v, int cap) { return {IncOfMin, v, cap, 0}; }
};

struct IntVarDef {
    std::string name;
    int lo, hi;
    std::vector<FluentId> eq;
};

class IntSpace {
public:
    explicit IntSpace(ProblemCore& core) : core_(core) {}

    int add_var(const std::string& name, int lo, int hi) {
        IntVarDef v{name, lo, hi, {}};
        for (int x = lo; x <= hi; ++x)
            v.eq.push_back(core_.fluents.add(name + "_eq_" + std::to_string(x)));
        vars_.push_back(std::move(v));
        return int(vars_.size()) - 1;
    }

    FluentId eq(int var, int value) const {
        const IntVarDef& v = vars_[std::size_t(var)];
        assert(value >= v.lo && value <= v.hi);
        return v.eq[std::size_t(value - v.lo)];
    }
    int lo(int var) const { return vars_[std::size_t(var)].lo; }
    int hi(int var) const { return vars_[std::size_t(var)].hi; }
    const std::string& name(int var) const { return vars_[std::size_t(var)].name; }

    FluentId track(int x, int y, bool lt) {
        // var names are never bare numbers, so x_eq_y cannot collide with the
        // per-value assignment fluents x_eq_0, x_eq_1, ...
        FluentId f = core_.fluents.add(name(x) + (lt ? "_lt_" : "_eq_") + name(y));
        cmps_.push_back({x, y, lt, false, 0, f});
        return f;
    }

    FluentId track_const(int x, int c, bool lt) {
        FluentId f = core_.fluents.add(name(x) + (lt ? "_lt_c" : "_eq_c") +
                                       std::to_string(c));
        cmps_.push_back({x, -1, lt, true, c, f});
        return f;
    }

    int clamp(int var, int val) const {
        return std::min(std::max(val, lo(var)), hi(var));
    }

    Action update_action(const std::string& act_name,
                         const std::vector<std::pair<int, Expr>>& updates) const {
        Action act;
        act.name = act_name;

        auto sources = [](const Expr& e) {
            std::vector<int> s;
            if (e.a >= 0) s.push_back(e.a);
            if (e.b >= 0 && e.b != e.a) s.push_back(e.b);
            return s;
        };
        auto eval = [&](const Expr& e, const std::map<int, int>& asg) {
            switch (e.kind) {
            case Expr::Const: return e.c;
            case Expr::Of: return asg.at(e.a);
            case Expr::IncOf: return asg.at(e.a) + 1;
            case Expr::DecOf: return asg.at(e.a) - 1;
            case Expr::AddOf: return asg.at(e.a) + asg.at(e.b);
            case Expr::IncOfMin:
                return std::min(asg.at(e.a) + 1, asg.at(e.b));
            }
            return 0;
        };
        // Enumerates total assignments over `srcs`, calling fn for each.
        auto enumerate = [&](const std::vector<int>& srcs, auto&& fn) {
            std::map<int, int> asg;
            std::function<void(std::size_t)> rec = [&](std::size_t at) {
                if (at == srcs.size()) {
                    fn(asg);
                    return;
                }
                int v = srcs[at];
                for (int x = lo(v); x <= hi(v); ++x) {
                    asg[v] = x;
                    rec(at + 1);
                }
                asg.erase(v);
            };
            rec(0);
        };
        auto cond_of = [&](const std::map<int, int>& asg) {
            LiteralSet cond;
            for (auto [v, x] : asg) cond.add(pos(eq(v, x)));
            return cond;
        };

        for (const auto& [v, e] : updates) {
            std::vector<int> srcs = sources(e);
            bool self_in = std::count(srcs.begin(), srcs.end(), v) > 0;
            enumerate(srcs, [&](const std::map<int, int>& asg) {
                int post = clamp(v, eval(e, asg));
                LiteralSet cond = cond_of(asg);
                if (self_in) {
                    int pre = asg.at(v);
                    if (post == pre) return;
                    LiteralSet eff;
                    eff.add(neg(eq(v, pre)));
                    eff.add(pos(eq(v, post)));
                    act.effects.push_back({std::move(cond), std::move(eff)});
                } else {
                    act.effects.push_back({cond, LiteralSet{pos(eq(v, post))}});
                    for (int a0 = lo(v); a0 <= hi(v); ++a0) {
                        if (a0 == post) continue;
                        LiteralSet c2 = cond;
                        c2.add(pos(eq(v, a0)));
                        act.effects.push_back({std::move(c2),
                                               LiteralSet{neg(eq(v, a0))}});
                    }
                }
            });
        }

        // Keep every tracked comparison consistent with the post-state.
        std::map<int, Expr> upd;
        for (const auto& [v, e] : updates) upd.emplace(v, e);
        for (const Cmp& c : cmps_) {
            bool xu = upd.count(c.x) > 0;
            bool yu = !c.y_is_const && upd.count(c.y) > 0;
            if (!xu && !yu) continue;
            std::set<int> srcset;
            if (xu)
                for (int s : sources(upd.at(c.x))) srcset.insert(s);
            else
                srcset.insert(c.x);
            if (!c.y_is_const) {
                if (yu)
                    for (int s : sources(upd.at(c.y))) srcset.insert(s);
                else
                    srcset.insert(c.y);
            }
            std::vector<int> srcs(srcset.begin(), srcset.end());
            enumerate(srcs, [&](const std::map<int, int>& asg) {
                int px = xu ? clamp(c.x, eval(upd.at(c.x), asg)) : asg.at(c.x);
                int py = c.y_is_const
                             ? c.y_const
                             : (yu ? clamp(c.y, eval(upd.at(c.y), asg))
                                   : asg.at(c.y));
                bool truth = c.lt ? px < py : px == py;
                act.effects.push_back(
                    {cond_of(asg),
                     LiteralSet{truth ? pos(c.fluent) : neg(c.fluent)}});
            });
        }
        return act;
    }

    // Sets variable assignments and recomputes every tracked comparison.
    void write_state(State& s, const std::map<int, int>& values) const {
        for (auto [v, x] : values) s.set(eq(v, x), true);
        for (const Cmp& c : cmps_) {
            auto xv = values.find(c.x);
            if (xv == values.end()) continue;
            int py;
            if (c.y_is_const) {
                py = c.y_const;
            } else {
                auto yv = values.find(c.y);
                if (yv == values.end()) continue;
                py = yv->second;
            }
            bool truth = c.lt ? xv->second < py : xv->second == py;
            s.set(c.fluent, truth);
        }
    }

    std::vector<TrackedComparison> tracked() const {
        std::vector<TrackedComparison> out;
        for (const Cmp& c : cmps_) {
            TrackedComparison t;
            t.fluent = c.fluent;
            t.x = name(c.x);
            if (c.y_is_const) {
                t.y_is_const = true;
                t.y_const = c.y_const;
            } else {
                t.y = name(c.y);
            }
            t.lt = c.lt;
            out.push_back(std::move(t));
        }
        return out;
    }

    std::map<std::string, IntFamily> families() const {
        std::map<std::string, IntFamily> out;
        for (const IntVarDef& v : vars_) out[v.name] = {v.lo, v.eq};
        return out;
    }

private:
    struct Cmp {
        int x;
        int y;
        bool lt;
        bool y_is_const;
        int y_const;
        FluentId fluent;
    };

    ProblemCore& core_;
    std::vector<IntVarDef> vars_;
    std::vector<Cmp> cmps_;
};

State blank_state(const ProblemCore& core) {
    return State(core.fluents.size());
}

void finish_recipe(DomainRecipe& r, const IntSpace& iv) {
    r.tracked = iv.tracked();
    r.int_vars = iv.families();
}

} // namespace

// -- Recipes ---------------------------------------------------------------------

DomainRecipe make_grid_to_origin(int width, int height,
                                 const std::vector<std::pair<int, int>>& starts) {
    if (width < 2 || height < 2 || starts.empty())
        throw BadConfigError("grid_to_origin: need width,height >= 2 and starts");
    auto core = std::make_shared<ProblemCore>();
    IntSpace iv(*core);
    int x = iv.add_var("x", 0, width - 1);
    int y = iv.add_var("y", 0, height - 1);
    core->add_action(iv.update_action("dec_x", {{x, Expr::dec(x)}}));
    core->add_action(iv.update_action("dec_y", {{y, Expr::dec(y)}}));

    DomainRecipe r;
    r.name = "grid_to_origin";
    r.gp.core = core;
    r.gp.condition_pool = {iv.eq(x, 0), iv.eq(y, 0)};
    LiteralSet goal{pos(iv.eq(x, 0)), pos(iv.eq(y, 0))};
    for (auto [sx, sy] : starts) {
        if (sx >= width || sy >= height || sx < 0 || sy < 0)
            throw BadConfigError("grid_to_origin: start outside grid");
        State s = blank_state(*core);
        iv.write_state(s, {{x, sx}, {y, sy}});
        r.gp.instances.push_back({std::move(s), goal});
    }
    finish_recipe(r, iv);
    return r;
}

DomainRecipe make_grid_nav(int width, int height,
                           const std::vector<std::array<int, 4>>& cases) {
    if (width < 2 || height < 2 || cases.empty())
        throw BadConfigError("grid_nav: need width,height >= 2 and cases");
    auto core = std::make_shared<ProblemCore>();
    IntSpace iv(*core);
    int x = iv.add_var("x", 0, width - 1);
    int y = iv.add_var("y", 0, height - 1);
    int xg = iv.add_var("xg", 0, width - 1);
    int yg = iv.add_var("yg", 0, height - 1);
    FluentId x_eq_xg = iv.track(x, xg, false);
    FluentId x_lt_xg = iv.track(x, xg, true);
    FluentId y_eq_yg = iv.track(y, yg, false);
    FluentId y_lt_yg = iv.track(y, yg, true);
    core->add_action(iv.update_action("inc_x", {{x, Expr::inc(x)}}));
    core->add_action(iv.update_action("dec_x", {{x, Expr::dec(x)}}));
    core->add_action(iv.update_action("inc_y", {{y, Expr::inc(y)}}));
    core->add_action(iv.update_action("dec_y", {{y, Expr::dec(y)}}));

    DomainRecipe r;
    r.name = "grid_nav";
    r.gp.core = core;
    r.gp.condition_pool = {x_eq_xg, y_eq_yg, x_lt_xg, y_lt_yg};

    SubtaskSuite suite;
    SubtaskDef col{"p1", {}, {core, {}, {x_eq_xg, x_lt_xg}}, 5};
    SubtaskDef row{"p2", {}, {core, {}, {y_eq_yg, y_lt_yg}}, 5};

    for (const auto& cs : cases) {
        auto [sx, sy, gx, gy] = std::array{cs[0], cs[1], cs[2], cs[3]};
        State s = blank_state(*core);
        iv.write_state(s, {{x, sx}, {y, sy}, {xg, gx}, {yg, gy}});
        r.gp.instances.push_back(
            {s, LiteralSet{pos(x_eq_xg), pos(y_eq_yg)}});
        col.gp.instances.push_back({s, LiteralSet{pos(x_eq_xg)}});
        row.gp.instances.push_back({s, LiteralSet{pos(y_eq_yg)}});
    }
    suite.subtasks.push_back(std::move(col));
    suite.subtasks.push_back(std::move(row));
    r.subtasks = std::move(suite);
    finish_recipe(r, iv);
    return r;
}

DomainRecipe make_summatory(const std::vector<int>& values) {
    if (values.empty()) throw BadConfigError("summatory: need values");
    int nmax = *std::max_element(values.begin(), values.end());
    if (nmax < 1) throw BadConfigError("summatory: values must be >= 1");
    int goal_max = nmax * (nmax + 1) / 2;

    auto core = std::make_shared<ProblemCore>();
    IntSpace iv(*core);
    int n = iv.add_var("n", 0, nmax);
    // kept strictly above every goal so saturation can never fake one
    int y = iv.add_var("y", 0, goal_max + 2);
    core->add_action(iv.update_action("add_y_n", {{y, Expr::add(y, n)}}));
    core->add_action(iv.update_action("dec_n", {{n, Expr::dec(n)}}));

    DomainRecipe r;
    r.name = "summatory";
    r.gp.core = core;
    r.gp.condition_pool = {iv.eq(n, 0)};
    for (int m : values) {
        State s = blank_state(*core);
        iv.write_state(s, {{n, m}, {y, 0}});
        r.gp.instances.push_back(
            {std::move(s), LiteralSet{pos(iv.eq(y, m * (m + 1) / 2))}});
    }
    finish_recipe(r, iv);
    return r;
}

DomainRecipe make_fibonacci(const std::vector<int>& values) {
    if (values.empty()) throw BadConfigError("fibonacci: need values");
    int mmax = *std::max_element(values.begin(), values.end());
    if (mmax < 2) throw BadConfigError("fibonacci: values must be >= 2");
    // F(1) = F(2) = 1
    std::vector<int> fib{0, 1};
    for (int i = 2; i <= mmax; ++i)
        fib.push_back(fib[std::size_t(i) - 1] + fib[std::size_t(i) - 2]);
    int vmax = fib.back() + fib[fib.size() - 2] + 1;

    auto core = std::make_shared<ProblemCore>();
    IntSpace iv(*core);
    int n = iv.add_var("n", 0, mmax);
    int fn = iv.add_var("fn", 0, vmax);
    int fn1 = iv.add_var("fn1", 0, vmax);
    int fn2 = iv.add_var("fn2", 0, vmax);
    core->add_action(iv.update_action("assign_fn2_fn", {{fn2, Expr::of(fn)}}));
    core->add_action(iv.update_action("add_fn_fn1", {{fn, Expr::add(fn, fn1)}}));
    core->add_action(iv.update_action("assign_fn1_fn2", {{fn1, Expr::of(fn2)}}));
    core->add_action(iv.update_action("dec_n", {{n, Expr::dec(n)}}));

    DomainRecipe r;
    r.name = "fibonacci";
    r.gp.core = core;
    r.gp.condition_pool = {iv.eq(n, 1)};
    for (int m : values) {
        State s = blank_state(*core);
        iv.write_state(s, {{n, m}, {fn, 1}, {fn1, 0}, {fn2, 0}});
        r.gp.instances.push_back(
            {std::move(s), LiteralSet{pos(iv.eq(fn, fib[std::size_t(m)]))}});
    }
    finish_recipe(r, iv);
    return r;
}

DomainRecipe make_reverse(const std::vector<std::vector<int>>& lists) {
    if (lists.empty()) throw BadConfigError("reverse: need lists");
    int nmax = 0, vmax = 0;
    for (const auto& l : lists) {
        nmax = std::max(nmax, int(l.size()));
        for (int v : l) {
            if (v < 1) throw BadConfigError("reverse: values must be >= 1");
            vmax = std::max(vmax, v);
        }
    }
    if (nmax < 1) throw BadConfigError("reverse: empty list");

    auto core = std::make_shared<ProblemCore>();
    IntSpace iv(*core);
    int i = iv.add_var("i", 1, nmax);
    int j = iv.add_var("j", 1, nmax);
    std::vector<int> cell;
    for (int rpos = 1; rpos <= nmax; ++rpos)
        cell.push_back(iv.add_var("v" + std::to_string(rpos), 0, vmax));
    FluentId j_lt_i = iv.track(j, i, true);
    core->add_action(iv.update_action("inc_i", {{i, Expr::inc(i)}}));
    core->add_action(iv.update_action("dec_j", {{j, Expr::dec(j)}}));

    Action swap;
    swap.name = "swap_i_j";
    for (int a = 1; a <= nmax; ++a)
        for (int c = 1; c <= nmax; ++c) {
            if (a == c) continue;
            for (int xv = 0; xv <= vmax; ++xv)
                for (int yv = 0; yv <= vmax; ++yv) {
                    if (xv == yv) continue;
                    LiteralSet cond{pos(iv.eq(i, a)), pos(iv.eq(j, c)),
                                    pos(iv.eq(cell[std::size_t(a - 1)], xv)),
                                    pos(iv.eq(cell[std::size_t(c - 1)], yv))};
                    LiteralSet eff{neg(iv.eq(cell[std::size_t(a - 1)], xv)),
                                   pos(iv.eq(cell[std::size_t(a - 1)], yv)),
                                   neg(iv.eq(cell[std::size_t(c - 1)], yv)),
                                   pos(iv.eq(cell[std::size_t(c - 1)], xv))};
                    swap.effects.push_back({std::move(cond), std::move(eff)});
                }
        }
    core->add_action(std::move(swap));

    DomainRecipe r;
    r.name = "reverse";
    r.gp.core = core;
    r.gp.condition_pool = {j_lt_i};
    for (const auto& l : lists) {
        State s = blank_state(*core);
        std::map<int, int> vals{{i, 1}, {j, int(l.size())}};
        for (int rpos = 1; rpos <= nmax; ++rpos)
            vals[cell[std::size_t(rpos - 1)]] =
                rpos <= int(l.size()) ? l[std::size_t(rpos - 1)] : 0;
        iv.write_state(s, vals);
        LiteralSet goal;
        for (int rpos = 1; rpos <= int(l.size()); ++rpos)
            goal.add(pos(iv.eq(cell[std::size_t(rpos - 1)],
                               l[l.size() - std::size_t(rpos)])));
        r.gp.instances.push_back({std::move(s), std::move(goal)});
    }
    finish_recipe(r, iv);
    return r;
}

DomainRecipe make_sorting(const std::vector<std::vector<int>>& lists) {
    if (lists.empty()) throw BadConfigError("sorting: need lists");
    int nmax = 0, vmax = 0;
    for (const auto& l : lists) {
        nmax = std::max(nmax, int(l.size()));
        for (int v : l) {
            if (v < 1) throw BadConfigError("sorting: values must be >= 1");
            vmax = std::max(vmax, v);
        }
    }
    if (nmax < 1) throw BadConfigError("sorting: empty list");

    auto core = std::make_shared<ProblemCore>();
    IntSpace iv(*core);
    int i = iv.add_var("i", 1, nmax);
    int j = iv.add_var("j", 1, nmax);
    int k = iv.add_var("k", 1, nmax);
    int n = iv.add_var("n", 1, nmax);
    std::vector<int> cell;
    for (int rpos = 1; rpos <= nmax; ++rpos)
        cell.push_back(iv.add_var("v" + std::to_string(rpos), 0, vmax));
    FluentId i_eq_n = iv.track(i, n, false);
    FluentId j_eq_n = iv.track(j, n, false);
    // value at position j strictly below value at position k; doubly indirect,
    // so every maintenance row is spelled out by hand below
    FluentId vj_lt_vk = core->fluents.add("vj_lt_vk");

    auto cellv = [&](int posn) { return cell[std::size_t(posn - 1)]; };

    {
        // advance to the next pass: i, j and k all move to min(i+1, n)
        Action a = iv.update_action(
            "inc_i", {{i, Expr::inc_capped(i, n)},
                      {j, Expr::inc_capped(i, n)},
                      {k, Expr::inc_capped(i, n)}});
        a.effects.push_back({LiteralSet{}, LiteralSet{neg(vj_lt_vk)}});
        core->add_action(std::move(a));
    }
    {
        Action a = iv.update_action("inc_j", {{j, Expr::inc_capped(j, n)}});
        for (int b = 1; b <= nmax; ++b)
            for (int cn = 1; cn <= nmax; ++cn) {
                int b2 = std::min(b + 1, cn);
                if (b2 == b) continue;
                for (int c = 1; c <= nmax; ++c) {
                    LiteralSet base{pos(iv.eq(j, b)), pos(iv.eq(n, cn)),
                                    pos(iv.eq(k, c))};
                    if (b2 == c) {
                        a.effects.push_back({base, LiteralSet{neg(vj_lt_vk)}});
                        continue;
                    }
                    for (int xv = 0; xv <= vmax; ++xv)
                        for (int yv = 0; yv <= vmax; ++yv) {
                            LiteralSet cond = base;
                            cond.add(pos(iv.eq(cellv(b2), xv)));
                            cond.add(pos(iv.eq(cellv(c), yv)));
                            a.effects.push_back(
                                {std::move(cond),
                                 LiteralSet{xv < yv ? pos(vj_lt_vk)
                                                    : neg(vj_lt_vk)}});
                        }
                }
            }
        core->add_action(std::move(a));
    }
    {
        Action a = iv.update_action("assign_k_j", {{k, Expr::of(j)}});
        a.effects.push_back({LiteralSet{}, LiteralSet{neg(vj_lt_vk)}});
        core->add_action(std::move(a));
    }
    {
        Action a;
        a.name = "swap_i_k";
        for (int av = 1; av <= nmax; ++av)
            for (int c = 1; c <= nmax; ++c) {
                if (av == c) continue;
                for (int xv = 0; xv <= vmax; ++xv)
                    for (int yv = 0; yv <= vmax; ++yv) {
                        if (xv == yv) continue;
                        LiteralSet cond{pos(iv.eq(i, av)), pos(iv.eq(k, c)),
                                        pos(iv.eq(cellv(av), xv)),
                                        pos(iv.eq(cellv(c), yv))};
                        LiteralSet eff{neg(iv.eq(cellv(av), xv)),
                                       pos(iv.eq(cellv(av), yv)),
                                       neg(iv.eq(cellv(c), yv)),
                                       pos(iv.eq(cellv(c), xv))};
                        a.effects.push_back({std::move(cond), std::move(eff)});
                    }
                // comparison upkeep: after the swap the value at k is the old
                // value at i
                for (int b = 1; b <= nmax; ++b) {
                    if (b == c) {
                        // value at j = old value at i = value at k: equal
                        a.effects.push_back(
                            {LiteralSet{pos(iv.eq(i, av)), pos(iv.eq(k, c)),
                                        pos(iv.eq(j, b))},
                             LiteralSet{neg(vj_lt_vk)}});
                        continue;
                    }
                    if (b == av) {
                        for (int xv = 0; xv <= vmax; ++xv)
                            for (int yv = 0; yv <= vmax; ++yv)
                                a.effects.push_back(
                                    {LiteralSet{pos(iv.eq(i, av)),
                                                pos(iv.eq(k, c)),
                                                pos(iv.eq(j, b)),
                                                pos(iv.eq(cellv(av), xv)),
                                                pos(iv.eq(cellv(c), yv))},
                                     LiteralSet{yv < xv ? pos(vj_lt_vk)
                                                        : neg(vj_lt_vk)}});
                        continue;
                    }
                    for (int xv = 0; xv <= vmax; ++xv)
                        for (int zv = 0; zv <= vmax; ++zv)
                            a.effects.push_back(
                                {LiteralSet{pos(iv.eq(i, av)), pos(iv.eq(k, c)),
                                            pos(iv.eq(j, b)),
                                            pos(iv.eq(cellv(av), xv)),
                                            pos(iv.eq(cellv(b), zv))},
                                 LiteralSet{zv < xv ? pos(vj_lt_vk)
                                                    : neg(vj_lt_vk)}});
                }
            }
        core->add_action(std::move(a));
    }

    DomainRecipe r;
    r.name = "sorting";
    r.gp.core = core;
    r.gp.condition_pool = {i_eq_n};

    auto make_instance = [&](const std::vector<int>& l, int start) {
        State s = blank_state(*core);
        std::map<int, int> vals{{i, start}, {j, start}, {k, start},
                                {n, int(l.size())}};
        for (int rpos = 1; rpos <= nmax; ++rpos)
            vals[cellv(rpos)] =
                rpos <= int(l.size()) ? l[std::size_t(rpos - 1)] : 0;
        iv.write_state(s, vals);
        // j and k point at the same cell initially
        s.set(vj_lt_vk, false);
        return s;
    };

    for (const auto& l : lists) {
        State s = make_instance(l, 1);
        std::vector<int> sorted = l;
        std::sort(sorted.begin(), sorted.end());
        LiteralSet goal;
        for (int rpos = 1; rpos <= int(l.size()); ++rpos)
            goal.add(pos(iv.eq(cellv(rpos), sorted[std::size_t(rpos - 1)])));
        r.gp.instances.push_back({std::move(s), std::move(goal)});
    }

    // Subtask: from aligned iterators at position e, leave k at the first
    // minimum of the slice e..n, the scan finished and the list untouched.
    SubtaskDef select{"p1", {}, {core, {}, {j_eq_n, vj_lt_vk}}, 4};
    auto add_select_instance = [&](const std::vector<int>& l, int e) {
        if (e > int(l.size())) return;
        State s = make_instance(l, e);
        int arg = e;
        for (int rpos = e + 1; rpos <= int(l.size()); ++rpos)
            if (l[std::size_t(rpos - 1)] < l[std::size_t(arg - 1)]) arg = rpos;
        LiteralSet goal{pos(iv.eq(k, arg)), pos(iv.eq(j, int(l.size()))),
                        pos(iv.eq(i, e))};
        for (int rpos = 1; rpos <= int(l.size()); ++rpos)
            goal.add(pos(iv.eq(cellv(rpos), l[std::size_t(rpos - 1)])));
        select.gp.instances.push_back({std::move(s), std::move(goal)});
    };
    for (const auto& l : lists) {
        add_select_instance(l, 1);
        if (l.size() >= 3) add_select_instance(l, 2);
    }
    SubtaskSuite suite;
    suite.subtasks.push_back(std::move(select));
    r.subtasks = std::move(suite);

    finish_recipe(r, iv);
    return r;
}

DomainRecipe make_list_visit(const std::vector<int>& lengths) {
    if (lengths.empty()) throw BadConfigError("list_visit: need lengths");
    int nmax = *std::max_element(lengths.begin(), lengths.end());
    if (nmax < 1 || *std::min_element(lengths.begin(), lengths.end()) < 1)
        throw BadConfigError("list_visit: lengths must be >= 1");

    auto core = std::make_shared<ProblemCore>();
    IntSpace iv(*core);
    int cur = iv.add_var("cur", 1, nmax);
    std::vector<std::vector<FluentId>> next(std::size_t(nmax) + 1,
                                            std::vector<FluentId>(std::size_t(nmax) + 1, kNoFluent));
    for (int u = 1; u <= nmax; ++u)
        for (int v = 1; v <= nmax; ++v) {
            if (u == v) continue;
            next[std::size_t(u)][std::size_t(v)] = core->fluents.add(
                "next_" + std::to_string(u) + "_" + std::to_string(v));
        }
    std::vector<FluentId> is_tail{kNoFluent}, visited{kNoFluent};
    for (int u = 1; u <= nmax; ++u) {
        is_tail.push_back(core->fluents.add("is_tail_" + std::to_string(u)));
        visited.push_back(core->fluents.add("visited_" + std::to_string(u)));
    }
    FluentId cur_is_tail = core->fluents.add("cur_is_tail");

    {
        Action a;
        a.name = "visit";
        for (int u = 1; u <= nmax; ++u)
            a.effects.push_back({LiteralSet{pos(iv.eq(cur, u))},
                                 LiteralSet{pos(visited[std::size_t(u)])}});
        core->add_action(std::move(a));
    }
    {
        Action a;
        a.name = "next";
        for (int u = 1; u <= nmax; ++u)
            for (int v = 1; v <= nmax; ++v) {
                if (u == v) continue;
                FluentId link = next[std::size_t(u)][std::size_t(v)];
                a.effects.push_back(
                    {LiteralSet{pos(iv.eq(cur, u)), pos(link)},
                     LiteralSet{neg(iv.eq(cur, u)), pos(iv.eq(cur, v))}});
                a.effects.push_back(
                    {LiteralSet{pos(iv.eq(cur, u)), pos(link),
                                pos(is_tail[std::size_t(v)])},
                     LiteralSet{pos(cur_is_tail)}});
                a.effects.push_back(
                    {LiteralSet{pos(iv.eq(cur, u)), pos(link),
                                neg(is_tail[std::size_t(v)])},
                     LiteralSet{neg(cur_is_tail)}});
            }
        core->add_action(std::move(a));
    }

    DomainRecipe r;
    r.name = "list_visit";
    r.gp.core = core;
    r.gp.condition_pool = {cur_is_tail};
    for (int len : lengths) {
        State s = blank_state(*core);
        iv.write_state(s, {{cur, 1}});
        for (int u = 1; u < len; ++u)
            s.set(next[std::size_t(u)][std::size_t(u + 1)], true);
        s.set(is_tail[std::size_t(len)], true);
        s.set(cur_is_tail, len == 1);
        LiteralSet goal;
        for (int u = 1; u <= len; ++u) goal.add(pos(visited[std::size_t(u)]));
        r.gp.instances.push_back({std::move(s), std::move(goal)});
    }
    finish_recipe(r, iv);
    return r;
}

DomainRecipe make_tree_dfs(const std::vector<TreeShape>& trees) {
    if (trees.empty()) throw BadConfigError("tree_dfs: need trees");
    int nmax = 0;
    for (const TreeShape& t : trees) {
        if (t.children.empty())
            throw BadConfigError("tree_dfs: empty tree");
        nmax = std::max(nmax, int(t.children.size()));
        for (auto [l, rch] : t.children) {
            if (l >= int(t.children.size()) || rch >= int(t.children.size()))
                throw BadConfigError("tree_dfs: child index out of range");
            if ((l < 0) != (rch < 0))
                throw BadConfigError("tree_dfs: trees must be proper binary");
        }
    }

    auto core = std::make_shared<ProblemCore>();
    std::vector<std::string> node_names;
    for (int u = 1; u <= nmax; ++u)
        node_names.push_back("n" + std::to_string(u));

    auto add_node_var = [&](const std::string& vname, bool stack) {
        VariableObject var;
        var.name = vname;
        var.domain = "node";
        var.values = node_names;
        for (const std::string& val : node_names)
            var.assign.push_back(core->fluents.add(vname + "_eq_" + val));
        var.stackable = stack;
        core->variables.push_back(std::move(var));
        return int(core->variables.size()) - 1;
    };
    int root = add_node_var("root", false);
    int current = add_node_var("current", true);
    int child = add_node_var("child", true);

    std::vector<FluentId> visited{kNoFluent}, is_internal{kNoFluent};
    std::vector<std::vector<FluentId>> leftp(
        std::size_t(nmax) + 1, std::vector<FluentId>(std::size_t(nmax) + 1, kNoFluent));
    auto rightp = leftp;
    for (int u = 1; u <= nmax; ++u) {
        visited.push_back(core->fluents.add("visited_n" + std::to_string(u)));
        is_internal.push_back(
            core->fluents.add("is_internal_n" + std::to_string(u)));
    }
    for (int u = 1; u <= nmax; ++u)
        for (int v = 1; v <= nmax; ++v) {
            if (u == v) continue;
            leftp[std::size_t(u)][std::size_t(v)] = core->fluents.add(
                "left_n" + std::to_string(u) + "_n" + std::to_string(v));
            rightp[std::size_t(u)][std::size_t(v)] = core->fluents.add(
                "right_n" + std::to_string(u) + "_n" + std::to_string(v));
        }
    // true while the node held by `current` is still unvisited
    FluentId cur_fresh = core->fluents.add("cur_fresh");

    {
        VariableObject::DerivedBit fresh;
        fresh.fluent = cur_fresh;
        for (int u = 1; u <= nmax; ++u)
            fresh.guard_by_value.push_back(
                LiteralSet{neg(visited[std::size_t(u)])});
        core->variables[std::size_t(current)].derived.push_back(std::move(fresh));
    }

    for (int v : {current, child}) {
        for (FluentId f : core->variables[std::size_t(v)].assign)
            core->stackable.push_back(f);
    }
    core->stackable.push_back(cur_fresh);
    std::sort(core->stackable.begin(), core->stackable.end());

    auto cur_eq = [&](int u) {
        return core->variables[std::size_t(current)].assign[std::size_t(u - 1)];
    };
    auto child_eq = [&](int u) {
        return core->variables[std::size_t(child)].assign[std::size_t(u - 1)];
    };

    {
        Action a;
        a.name = "visit";
        for (int u = 1; u <= nmax; ++u)
            a.effects.push_back({LiteralSet{pos(cur_eq(u))},
                                 LiteralSet{pos(visited[std::size_t(u)])}});
        a.effects.push_back({LiteralSet{}, LiteralSet{neg(cur_fresh)}});
        core->add_action(std::move(a));
    }
    auto child_move = [&](const std::string& name, const auto& ptr) {
        Action a;
        a.name = name;
        for (int u = 1; u <= nmax; ++u) {
            for (int v = 1; v <= nmax; ++v) {
                if (u == v) continue;
                FluentId link = ptr[std::size_t(u)][std::size_t(v)];
                a.effects.push_back({LiteralSet{pos(cur_eq(u)), pos(link)},
                                     LiteralSet{pos(child_eq(v))}});
                for (int w = 1; w <= nmax; ++w) {
                    if (w == v) continue;
                    a.effects.push_back(
                        {LiteralSet{pos(cur_eq(u)), pos(link),
                                    pos(child_eq(w))},
                         LiteralSet{neg(child_eq(w))}});
                }
            }
            // a leaf points the probe back at the node itself
            a.effects.push_back(
                {LiteralSet{pos(cur_eq(u)), neg(is_internal[std::size_t(u)])},
                 LiteralSet{pos(child_eq(u))}});
            for (int w = 1; w <= nmax; ++w) {
                if (w == u) continue;
                a.effects.push_back(
                    {LiteralSet{pos(cur_eq(u)), neg(is_internal[std::size_t(u)]),
                                pos(child_eq(w))},
                     LiteralSet{neg(child_eq(w))}});
            }
        }
        return a;
    };
    core->add_action(child_move("left", leftp));
    core->add_action(child_move("right", rightp));

    DomainRecipe r;
    r.name = "tree_dfs";
    r.gp.core = core;
    r.gp.condition_pool = {cur_fresh};
    for (const TreeShape& t : trees) {
        State s = blank_state(*core);
        int count = int(t.children.size());
        for (int u = 0; u < count; ++u) {
            auto [l, rch] = t.children[std::size_t(u)];
            if (l >= 0) {
                s.set(is_internal[std::size_t(u + 1)], true);
                s.set(leftp[std::size_t(u + 1)][std::size_t(l + 1)], true);
                s.set(rightp[std::size_t(u + 1)][std::size_t(rch + 1)], true);
            }
        }
        s.set(core->variables[std::size_t(root)].assign[0], true);
        s.set(cur_eq(1), true);
        s.set(child_eq(1), true);
        s.set(cur_fresh, true);
        LiteralSet goal;
        for (int u = 1; u <= count; ++u)
            goal.add(pos(visited[std::size_t(u)]));
        r.gp.instances.push_back({std::move(s), std::move(goal)});
    }
    return r;
}

DomainRecipe make_hall_a(int n, const std::vector<std::pair<int, int>>& starts) {
    if (n < 1 || starts.empty())
        throw BadConfigError("hall_a: need n >= 1 and starts");
    auto core = std::make_shared<ProblemCore>();
    IntSpace iv(*core);
    int px = iv.add_var("posx", 0, n);
    int py = iv.add_var("posy", 0, n);
    FluentId corner[2][2];
    for (int a : {0, 1})
        for (int b : {0, 1})
            corner[a][b] = core->fluents.add(
                "corner_" + std::to_string(a * n) + "_" + std::to_string(b * n));

    // Axis-valued variables: a variable names a coordinate, dec/inc move the
    // coordinate the acting variable names.
    const std::vector<std::string> axes{"ax", "ay"};
    auto add_axis_var = [&](const std::string& vname, bool stack) {
        VariableObject var;
        var.name = vname;
        var.domain = "axis";
        var.values = axes;
        for (const std::string& val : axes)
            var.assign.push_back(core->fluents.add(vname + "_is_" + val));
        var.stackable = stack;
        core->variables.push_back(std::move(var));
        return int(core->variables.size()) - 1;
    };
    int varx = add_axis_var("x", false);
    int vary = add_axis_var("y", false);
    int aux = add_axis_var("aux", true);

    FluentId aux_eq_0 = core->fluents.add("aux_eq_0");
    FluentId aux_eq_n = core->fluents.add("aux_eq_n");
    {
        VariableObject& v = core->variables[std::size_t(aux)];
        VariableObject::DerivedBit at0, atn;
        at0.fluent = aux_eq_0;
        atn.fluent = aux_eq_n;
        at0.guard_by_value = {LiteralSet{pos(iv.eq(px, 0))},
                              LiteralSet{pos(iv.eq(py, 0))}};
        atn.guard_by_value = {LiteralSet{pos(iv.eq(px, n))},
                              LiteralSet{pos(iv.eq(py, n))}};
        v.derived.push_back(std::move(at0));
        v.derived.push_back(std::move(atn));
        for (FluentId f : v.assign) core->stackable.push_back(f);
        core->stackable.push_back(aux_eq_0);
        core->stackable.push_back(aux_eq_n);
        std::sort(core->stackable.begin(), core->stackable.end());
    }
    FluentId aux_is[2] = {core->variables[std::size_t(aux)].assign[0],
                          core->variables[std::size_t(aux)].assign[1]};

    auto move_action = [&](const std::string& name, int delta) {
        Action a;
        a.name = name;
        for (int axis = 0; axis < 2; ++axis) {
            int coord = axis == 0 ? px : py;
            int other = axis == 0 ? py : px;
            for (int at = 0; at <= n; ++at) {
                int land = at + delta;
                if (land < 0 || land > n) continue;
                LiteralSet cond{pos(aux_is[axis]), pos(iv.eq(coord, at))};
                LiteralSet eff{neg(iv.eq(coord, at)), pos(iv.eq(coord, land))};
                eff.add(land == 0 ? pos(aux_eq_0) : neg(aux_eq_0));
                eff.add(land == n ? pos(aux_eq_n) : neg(aux_eq_n));
                a.effects.push_back({cond, std::move(eff)});
                if (land == 0 || land == n) {
                    for (int b : {0, 1}) {
                        LiteralSet c2 = cond;
                        c2.add(pos(iv.eq(other, b * n)));
                        int ca = axis == 0 ? (land == 0 ? 0 : 1) : b;
                        int cb = axis == 0 ? b : (land == 0 ? 0 : 1);
                        a.effects.push_back(
                            {std::move(c2), LiteralSet{pos(corner[ca][cb])}});
                    }
                }
            }
        }
        return a;
    };
    core->add_action(move_action("dec_aux", -1));
    core->add_action(move_action("inc_aux", +1));

    // point aux at a coordinate (also what makes the instances solvable
    // without procedure calls)
    for (int axis = 0; axis < 2; ++axis) {
        Action a;
        a.name = axis == 0 ? "aux_to_x" : "aux_to_y";
        int coord = axis == 0 ? px : py;
        LiteralSet eff{pos(aux_is[axis]), neg(aux_is[1 - axis])};
        a.effects.push_back({LiteralSet{}, std::move(eff)});
        for (int at = 0; at <= n; ++at) {
            LiteralSet cond{pos(iv.eq(coord, at))};
            LiteralSet bits;
            bits.add(at == 0 ? pos(aux_eq_0) : neg(aux_eq_0));
            bits.add(at == n ? pos(aux_eq_n) : neg(aux_eq_n));
            a.effects.push_back({std::move(cond), std::move(bits)});
        }
        core->add_action(std::move(a));
    }

    DomainRecipe r;
    r.name = "hall_a";
    r.gp.core = core;
    r.gp.condition_pool = {aux_eq_0, aux_eq_n};
    LiteralSet goal{pos(corner[0][0]), pos(corner[0][1]), pos(corner[1][0]),
                    pos(corner[1][1])};
    auto base_state = [&](int sx, int sy) {
        State s = blank_state(*core);
        iv.write_state(s, {{px, sx}, {py, sy}});
        s.set(core->variables[std::size_t(varx)].assign[0], true);
        s.set(core->variables[std::size_t(vary)].assign[1], true);
        if ((sx == 0 || sx == n) && (sy == 0 || sy == n))
            s.set(corner[sx == 0 ? 0 : 1][sy == 0 ? 0 : 1], true);
        return s;
    };
    for (auto [sx, sy] : starts) {
        if (sx < 0 || sy < 0 || sx > n || sy > n)
            throw BadConfigError("hall_a: start outside grid");
        r.gp.instances.push_back({base_state(sx, sy), goal});
    }

    // Subtasks: drive the named coordinate to 0 (p1) and to n (p2). Starts
    // at distance n and distance 1 force the looping procedure.
    SubtaskSuite suite;
    ProcParam param{"axis", aux};
    for (int which : {0, 1}) {
        SubtaskDef def{which == 0 ? "p1" : "p2",
                       {param},
                       {core, {}, {aux_eq_0, aux_eq_n}},
                       2};
        for (int axis = 0; axis < 2; ++axis) {
            int dist = axis == 0 ? n : 1;
            int from = which == 0 ? dist : n - dist;
            State s = base_state(axis == 0 ? from : 0, axis == 0 ? 0 : from);
            s.set(aux_is[axis], true);
            s.set(aux_eq_0, from == 0);
            s.set(aux_eq_n, from == n);
            int coord = axis == 0 ? px : py;
            LiteralSet g{pos(iv.eq(coord, which == 0 ? 0 : n))};
            def.gp.instances.push_back({std::move(s), std::move(g)});
        }
        suite.subtasks.push_back(std::move(def));
    }
    r.subtasks = std::move(suite);

    finish_recipe(r, iv);
    return r;
}

DomainRecipe make_visit_all(const std::vector<std::pair<int, int>>& sizes) {
    if (sizes.empty()) throw BadConfigError("visit_all: need sizes");
    int wmax = 0, hmax = 0;
    for (auto [w, h] : sizes) {
        if (w < 1 || h < 1) throw BadConfigError("visit_all: bad size");
        wmax = std::max(wmax, w);
        hmax = std::max(hmax, h);
    }

    auto core = std::make_shared<ProblemCore>();
    IntSpace iv(*core);
    int x = iv.add_var("x", 1, wmax);
    int y = iv.add_var("y", 1, hmax);
    int w = iv.add_var("w", 1, wmax);
    int h = iv.add_var("h", 1, hmax);
    FluentId x_eq_w = iv.track(x, w, false);
    FluentId y_eq_h = iv.track(y, h, false);
    std::vector<std::vector<FluentId>> vis(
        std::size_t(wmax) + 1, std::vector<FluentId>(std::size_t(hmax) + 1, kNoFluent));
    for (int a = 1; a <= wmax; ++a)
        for (int b = 1; b <= hmax; ++b)
            vis[std::size_t(a)][std::size_t(b)] = core->fluents.add(
                "visited_" + std::to_string(a) + "_" + std::to_string(b));

    core->add_action(iv.update_action("inc_x", {{x, Expr::inc_capped(x, w)}}));
    core->add_action(iv.update_action("dec_x", {{x, Expr::dec(x)}}));
    core->add_action(iv.update_action("inc_y", {{y, Expr::inc_capped(y, h)}}));
    {
        Action a;
        a.name = "visit";
        for (int av = 1; av <= wmax; ++av)
            for (int b = 1; b <= hmax; ++b)
                a.effects.push_back(
                    {LiteralSet{pos(iv.eq(x, av)), pos(iv.eq(y, b))},
                     LiteralSet{pos(vis[std::size_t(av)][std::size_t(b)])}});
        core->add_action(std::move(a));
    }

    DomainRecipe r;
    r.name = "visit_all";
    r.gp.core = core;
    r.gp.condition_pool = {x_eq_w, y_eq_h, iv.eq(x, 1)};

    SubtaskSuite suite;
    SubtaskDef row{"p1", {}, {core, {}, {x_eq_w}}, 4};
    SubtaskDef back{"p2", {}, {core, {}, {iv.eq(x, 1)}}, 2};

    for (auto [wv, hv] : sizes) {
        State s = blank_state(*core);
        iv.write_state(s, {{x, 1}, {y, 1}, {w, wv}, {h, hv}});
        LiteralSet goal;
        for (int a = 1; a <= wv; ++a)
            for (int b = 1; b <= hv; ++b)
                goal.add(pos(vis[std::size_t(a)][std::size_t(b)]));
        r.gp.instances.push_back({std::move(s), std::move(goal)});

        State rs = blank_state(*core);
        iv.write_state(rs, {{x, 1}, {y, 1}, {w, wv}, {h, hv}});
        LiteralSet rg;
        for (int a = 1; a <= wv; ++a)
            rg.add(pos(vis[std::size_t(a)][1]));
        row.gp.instances.push_back({std::move(rs), std::move(rg)});

        State bs = blank_state(*core);
        iv.write_state(bs, {{x, wv}, {y, 1}, {w, wv}, {h, hv}});
        back.gp.instances.push_back({std::move(bs), LiteralSet{pos(iv.eq(x, 1))}});
    }
    suite.subtasks.push_back(std::move(row));
    suite.subtasks.push_back(std::move(back));
    r.subtasks = std::move(suite);

    finish_recipe(r, iv);
    return r;
}

// -- CLI factory -------------------------------------------------------------------

namespace {

int get_int(const std::map<std::string, std::string>& params,
            const std::string& key, int fallback) {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    try {
        return std::stoi(it->second);
    } catch (...) {
        throw BadConfigError("parameter " + key + " must be an integer");
    }
}

std::vector<int> get_ints(const std::map<std::string, std::string>& params,
                          const std::string& key,
                          const std::vector<int>& fallback) {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    std::vector<int> out;
    std::stringstream ss(it->second);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
        try {
            out.push_back(std::stoi(piece));
        } catch (...) {
            throw BadConfigError("parameter " + key + ": bad integer list");
        }
    }
    if (out.empty()) throw BadConfigError("parameter " + key + ": empty list");
    return out;
}

} // namespace

namespace {

void check_params(const std::string& domain,
                  const std::map<std::string, std::string>& params,
                  std::initializer_list<const char*> known) {
    for (const auto& [key, value] : params) {
        (void)value;
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok)
            throw BadConfigError(domain + ": unknown parameter '" + key + "'");
    }
}

} // namespace

std::vector<std::string> domain_names() {
    return {"grid_to_origin", "grid_nav", "hall_a",  "visit_all", "summatory",
            "fibonacci",      "reverse",  "sorting", "list_visit", "tree_dfs"};
}

DomainRecipe make_domain(const std::string& name,
                         const std::map<std::string, std::string>& params) {
    if (name == "grid_to_origin") {
        check_params(name, params, {"w", "h", "xs", "ys"});
        int w = get_int(params, "w", 5), h = get_int(params, "h", 5);
        std::vector<int> xs = get_ints(params, "xs", {2, 4, 0});
        std::vector<int> ys = get_ints(params, "ys", {1, 4, 3});
        if (xs.size() != ys.size())
            throw BadConfigError("grid_to_origin: xs/ys size mismatch");
        std::vector<std::pair<int, int>> starts;
        for (std::size_t t = 0; t < xs.size(); ++t)
            starts.emplace_back(xs[t], ys[t]);
        return make_grid_to_origin(w, h, starts);
    }
    if (name == "grid_nav") {
        check_params(name, params, {"w", "h"});
        int w = get_int(params, "w", 5), h = get_int(params, "h", 5);
        return make_grid_nav(w, h, {{3, 2, 0, 0}, {1, 4, 4, 1}});
    }
    if (name == "hall_a") {
        check_params(name, params, {"n", "xs", "ys"});
        int n = get_int(params, "n", 4);
        std::vector<int> xs = get_ints(params, "xs", {2, 3});
        std::vector<int> ys = get_ints(params, "ys", {1, 3});
        if (xs.size() != ys.size())
            throw BadConfigError("hall_a: xs/ys size mismatch");
        std::vector<std::pair<int, int>> starts;
        for (std::size_t t = 0; t < xs.size(); ++t)
            starts.emplace_back(xs[t], ys[t]);
        return make_hall_a(n, starts);
    }
    if (name == "visit_all") {
        check_params(name, params, {"ws", "hs"});
        std::vector<int> ws = get_ints(params, "ws", {3, 4});
        std::vector<int> hs = get_ints(params, "hs", {2, 3});
        if (ws.size() != hs.size())
            throw BadConfigError("visit_all: ws/hs size mismatch");
        std::vector<std::pair<int, int>> sizes;
        for (std::size_t t = 0; t < ws.size(); ++t)
            sizes.emplace_back(ws[t], hs[t]);
        return make_visit_all(sizes);
    }
    if (name == "summatory") {
        check_params(name, params, {"values", "holdout"});
        DomainRecipe r = make_summatory(get_ints(params, "values", {2, 3}));
        std::vector<int> hold = get_ints(params, "holdout",
                                         {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
        r.holdout = make_summatory(hold).gp;
        return r;
    }
    if (name == "fibonacci") {
        check_params(name, params, {"values", "holdout"});
        DomainRecipe r = make_fibonacci(get_ints(params, "values", {4, 5}));
        r.holdout = make_fibonacci(get_ints(params, "holdout", {2, 3, 4, 5, 6, 7})).gp;
        return r;
    }
    if (name == "reverse") {
        check_params(name, params, {});
        // a 2-list and a 4-list: no single swap or fixed swap chain handles
        // both, so only the looping program survives verification
        DomainRecipe r = make_reverse({{2, 1}, {4, 1, 3, 2}});
        r.holdout =
            make_reverse({{1, 2}, {5, 3, 1}, {4, 2, 3, 1}, {5, 1, 4, 2, 3}}).gp;
        return r;
    }
    if (name == "sorting") {
        check_params(name, params, {});
        return make_sorting({{2, 1}, {3, 1, 2}, {2, 4, 1, 3}});
    }
    if (name == "list_visit") {
        check_params(name, params, {"lengths"});
        return make_list_visit(get_ints(params, "lengths", {1, 2, 3, 4, 5, 6}));
    }
    if (name == "tree_dfs") {
        check_params(name, params, {});
        TreeShape t;
        t.children = {{1, 2}, {3, 4}, {5, 6}, {-1, -1}, {-1, -1}, {-1, -1}, {-1, -1}};
        return make_tree_dfs({t});
    }
    throw BadConfigError("unknown domain: " + name);
}

CorePtr make_int_var_core(const std::vector<std::pair<std::string, int>>& vars,
                          const std::vector<ComparisonSpec>& tracked,
                          std::vector<TrackedComparison>* tracked_out) {
    auto core = std::make_shared<ProblemCore>();
    IntSpace iv(*core);
    std::map<std::string, int> index;
    for (const auto& [vname, max] : vars) {
        if (max < 1) throw BadConfigError("int var max must be >= 1");
        index[vname] = iv.add_var(vname, 0, max);
    }
    for (const ComparisonSpec& c : tracked) {
        if (!index.count(c.x)) throw BadConfigError("unknown variable " + c.x);
        if (c.y_is_const)
            iv.track_const(index[c.x], c.y_const, c.lt);
        else if (index.count(c.y))
            iv.track(index[c.x], index[c.y], c.lt);
        else
            throw BadConfigError("unknown variable " + c.y);
    }
    for (const auto& [vname, max] : vars) {
        (void)max;
        int v = index[vname];
        core->add_action(iv.update_action("inc_" + vname, {{v, Expr::inc(v)}}));
        core->add_action(iv.update_action("dec_" + vname, {{v, Expr::dec(v)}}));
    }
    if (tracked_out) *tracked_out = iv.tracked();
    return core;
}

} // namespace genplan
