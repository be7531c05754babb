#pragma once

// Propositional classical planning with conditional effects: fluents,
// literals, bit-vector states, actions, successor computation and plan
// validation, plus generalized (multi-instance) problems sharing one
// fluent/action table.

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "genplan/errors.hpp"

namespace genplan {

using FluentId = std::int32_t;
constexpr FluentId kNoFluent = -1;

struct Literal {
    FluentId fluent = kNoFluent;
    bool positive = true;

    friend bool operator==(const Literal&, const Literal&) = default;
    friend bool operator<(const Literal& a, const Literal& b) {
        return a.fluent != b.fluent ? a.fluent < b.fluent
                                    : a.positive < b.positive;
    }
};

inline Literal pos(FluentId f) { return {f, true}; }
inline Literal neg(FluentId f) { return {f, false}; }
inline Literal negate(Literal l) { return {l.fluent, !l.positive}; }

// Sorted set of literals; never holds both polarities of one fluent.
class LiteralSet {
public:
    LiteralSet() = default;
    LiteralSet(std::initializer_list<Literal> lits);
    explicit LiteralSet(std::vector<Literal> lits);

    // Throws ConflictingEffectsError if the opposite polarity is present.
    void add(Literal l);
    // Returns false instead of throwing; used where conflicts must be probed.
    bool try_add(Literal l);

    bool contains(Literal l) const;
    bool contains_fluent(FluentId f) const;

    bool empty() const { return lits_.empty(); }
    std::size_t size() const { return lits_.size(); }
    auto begin() const { return lits_.begin(); }
    auto end() const { return lits_.end(); }
    const std::vector<Literal>& literals() const { return lits_; }

    friend bool operator==(const LiteralSet&, const LiteralSet&) = default;

private:
    std::vector<Literal> lits_; // sorted by fluent id
};

// Total assignment over a problem's fluents, stored as a bit vector. Dense
// fluent ids double as bit positions so hashing and copying stay cheap.
class State {
public:
    State() = default;
    explicit State(std::size_t num_fluents);

    bool test(FluentId f) const {
        return (bits_[std::size_t(f) >> 6] >> (std::size_t(f) & 63)) & 1u;
    }
    void set(FluentId f, bool value);
    bool holds(Literal l) const { return test(l.fluent) == l.positive; }
    bool satisfies(const LiteralSet& ls) const;

    std::size_t size() const { return n_; }
    std::size_t hash() const;

    friend bool operator==(const State& a, const State& b) {
        return a.n_ == b.n_ && a.bits_ == b.bits_;
    }

    const std::vector<std::uint64_t>& words() const { return bits_; }

private:
    std::vector<std::uint64_t> bits_;
    std::size_t n_ = 0;
};

struct StateHash {
    std::size_t operator()(const State& s) const { return s.hash(); }
};

struct ConditionalEffect {
    LiteralSet condition; // C
    LiteralSet effect;    // E
};

struct Action {
    std::string name;
    LiteralSet precondition;
    std::vector<ConditionalEffect> effects;
};

class FluentTable {
public:
    FluentId add(const std::string& name);
    FluentId id(std::string_view name) const; // kNoFluent if absent
    FluentId require(std::string_view name) const; // throws if absent
    const std::string& name(FluentId f) const { return names_.at(std::size_t(f)); }
    std::size_t size() const { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, FluentId> index_;
};

// A program variable represented as an object: it stores one value from a
// finite domain, encoded by one assign fluent per value.
struct VariableObject {
    std::string name;
    std::string domain; // domain name, e.g. "node" or "axis"
    std::vector<std::string> values;
    std::vector<FluentId> assign; // assign[v] true iff the variable holds values[v]
    bool stackable = false;

    // Derived per-variable fluent refreshed when a value is copied into this
    // variable: after copying value v the fluent becomes true iff
    // guard_by_value[v] holds at copy time (empty guard = unconditionally
    // true, disabled entries are marked absent).
    struct DerivedBit {
        FluentId fluent = kNoFluent;
        std::vector<std::optional<LiteralSet>> guard_by_value;
    };
    std::vector<DerivedBit> derived;

    int value_index(std::string_view value) const;
};

struct ProcParam {
    std::string domain;
    int fixed_var = -1; // index into ProblemCore::variables
};

struct ProcSignature {
    std::string name; // "main", "p1", ...
    std::vector<ProcParam> params;
};

// Shared fluent/action table of a (generalized) problem. Instances and
// compiled tasks refer to one immutable core through shared pointers.
struct ProblemCore {
    FluentTable fluents;
    std::vector<Action> actions;

    // Program-level metadata; empty for plain propositional problems.
    std::vector<VariableObject> variables;
    std::vector<FluentId> stackable; // K, sorted

    int add_action(Action a);
    const Action* find_action(std::string_view name) const;
    int action_index(std::string_view name) const; // -1 if absent
    int variable_index(std::string_view name) const;

    // fluent id -> dense index in `stackable`, or -1; computed fresh so
    // concurrent readers of a shared core never race
    std::vector<int> k_index() const;

private:
    std::unordered_map<std::string, int> action_index_;
};

using CorePtr = std::shared_ptr<const ProblemCore>;

struct Instance {
    State initial;
    LiteralSet goal;
};

struct ClassicalProblem {
    CorePtr core;
    State initial;
    LiteralSet goal;
};

struct GeneralizedProblem {
    CorePtr core;
    std::vector<Instance> instances;
    std::vector<FluentId> condition_pool;

    ClassicalProblem instance_problem(std::size_t t) const {
        return {core, instances.at(t).initial, instances.at(t).goal};
    }
};

struct Plan {
    std::vector<std::string> steps;
    std::vector<State> trace; // empty or steps.size() + 1 states
};

// -- Operations ------------------------------------------------------------

bool applicable(const State& s, const Action& a);

// Union of all effects whose conditions hold in s. Throws
// ConflictingEffectsError when two triggered effects disagree on a fluent.
LiteralSet triggered_effects(const State& s, const Action& a);

// Throws NotApplicableError / ConflictingEffectsError.
State apply(const State& s, const Action& a);

struct ValidationResult {
    bool solved = false;
    int violation_step = -1; // 0-based step of the first violation
    std::string reason;
    std::vector<State> trace; // up to and including the last reached state
};

// Replays the plan from P.initial. Unknown step names throw
// UnknownActionError; applicability and goal failures are reported in the
// result, with the trace cut at the violation.
ValidationResult validate_plan(const ClassicalProblem& p,
                               const std::vector<std::string>& steps);

} // namespace genplan
