#include "genplan/model.hpp"

#include <algorithm>

namespace genplan {

// -- LiteralSet --------------------------------------------------------------

LiteralSet::LiteralSet(std::initializer_list<Literal> lits) {
    for (Literal l : lits) add(l);
}

LiteralSet::LiteralSet(std::vector<Literal> lits) {
    for (Literal l : lits) add(l);
}

namespace {
// Position of the first literal with fluent >= f.
std::size_t lower_bound_fluent(const std::vector<Literal>& v, FluentId f) {
    std::size_t lo = 0, hi = v.size();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (v[mid].fluent < f)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}
} // namespace

bool LiteralSet::try_add(Literal l) {
    std::size_t at = lower_bound_fluent(lits_, l.fluent);
    if (at < lits_.size() && lits_[at].fluent == l.fluent)
        return lits_[at].positive == l.positive;
    lits_.insert(lits_.begin() + std::ptrdiff_t(at), l);
    return true;
}

void LiteralSet::add(Literal l) {
    if (!try_add(l))
        throw ConflictingEffectsError("conflicting literals on fluent id " +
                                      std::to_string(l.fluent));
}

bool LiteralSet::contains(Literal l) const {
    std::size_t at = lower_bound_fluent(lits_, l.fluent);
    return at < lits_.size() && lits_[at] == l;
}

bool LiteralSet::contains_fluent(FluentId f) const {
    std::size_t at = lower_bound_fluent(lits_, f);
    return at < lits_.size() && lits_[at].fluent == f;
}

// -- State -------------------------------------------------------------------

State::State(std::size_t num_fluents)
    : bits_((num_fluents + 63) / 64, 0), n_(num_fluents) {}

void State::set(FluentId f, bool value) {
    std::uint64_t mask = std::uint64_t(1) << (std::size_t(f) & 63);
    if (value)
        bits_[std::size_t(f) >> 6] |= mask;
    else
        bits_[std::size_t(f) >> 6] &= ~mask;
}

bool State::satisfies(const LiteralSet& ls) const {
    for (Literal l : ls)
        if (!holds(l)) return false;
    return true;
}

std::size_t State::hash() const {
    // splitmix-style mixing over the words
    std::uint64_t h = 0x9e3779b97f4a7c15ull ^ (std::uint64_t(n_) << 1);
    for (std::uint64_t w : bits_) {
        std::uint64_t x = w + 0x9e3779b97f4a7c15ull + h;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        h = x ^ (x >> 31);
    }
    return std::size_t(h);
}

// -- FluentTable ---------------------------------------------------------------

FluentId FluentTable::add(const std::string& name) {
    auto [it, fresh] = index_.emplace(name, FluentId(names_.size()));
    if (!fresh)
        throw NameCollisionError("duplicate fluent name: " + name);
    names_.push_back(name);
    return it->second;
}

FluentId FluentTable::id(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? kNoFluent : it->second;
}

FluentId FluentTable::require(std::string_view name) const {
    FluentId f = id(name);
    if (f == kNoFluent)
        throw Error("unknown fluent: " + std::string(name));
    return f;
}

// -- VariableObject / ProblemCore ---------------------------------------------

int VariableObject::value_index(std::string_view value) const {
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] == value) return int(i);
    return -1;
}

int ProblemCore::add_action(Action a) {
    auto [it, fresh] = action_index_.emplace(a.name, int(actions.size()));
    if (!fresh)
        throw NameCollisionError("duplicate action name: " + a.name);
    actions.push_back(std::move(a));
    return it->second;
}

const Action* ProblemCore::find_action(std::string_view name) const {
    int at = action_index(name);
    return at < 0 ? nullptr : &actions[std::size_t(at)];
}

int ProblemCore::action_index(std::string_view name) const {
    auto it = action_index_.find(std::string(name));
    return it == action_index_.end() ? -1 : it->second;
}

int ProblemCore::variable_index(std::string_view name) const {
    for (std::size_t i = 0; i < variables.size(); ++i)
        if (variables[i].name == name) return int(i);
    return -1;
}

std::vector<int> ProblemCore::k_index() const {
    std::vector<int> out(fluents.size(), -1);
    for (std::size_t i = 0; i < stackable.size(); ++i)
        out[std::size_t(stackable[i])] = int(i);
    return out;
}

// -- Operations ----------------------------------------------------------------

bool applicable(const State& s, const Action& a) {
    return s.satisfies(a.precondition);
}

LiteralSet triggered_effects(const State& s, const Action& a) {
    LiteralSet out;
    for (const ConditionalEffect& ce : a.effects) {
        if (!s.satisfies(ce.condition)) continue;
        for (Literal l : ce.effect) {
            if (!out.try_add(l))
                throw ConflictingEffectsError(
                    "action " + a.name +
                    " triggers both polarities of fluent id " +
                    std::to_string(l.fluent));
        }
    }
    return out;
}

State apply(const State& s, const Action& a) {
    if (!applicable(s, a))
        throw NotApplicableError("action " + a.name + " not applicable");
    LiteralSet eff = triggered_effects(s, a);
    State out = s;
    for (Literal l : eff) out.set(l.fluent, l.positive);
    return out;
}

ValidationResult validate_plan(const ClassicalProblem& p,
                               const std::vector<std::string>& steps) {
    ValidationResult r;
    r.trace.push_back(p.initial);
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const Action* a = p.core->find_action(steps[i]);
        if (!a) throw UnknownActionError(steps[i]);
        const State& cur = r.trace.back();
        if (!applicable(cur, *a)) {
            r.violation_step = int(i);
            r.reason = "precondition of " + steps[i] + " not satisfied";
            return r;
        }
        try {
            r.trace.push_back(apply(cur, *a));
        } catch (const ConflictingEffectsError& e) {
            r.violation_step = int(i);
            r.reason = e.what();
            return r;
        }
    }
    if (!r.trace.back().satisfies(p.goal)) {
        r.violation_step = int(steps.size());
        r.reason = "goal not satisfied in final state";
        return r;
    }
    r.solved = true;
    return r;
}

} // namespace genplan
