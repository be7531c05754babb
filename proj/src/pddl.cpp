#include "genplan/pddl.hpp"

#include <atomic>
#include <cctype>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

namespace genplan {

std::string sanitize_pddl_name(const std::string& name) {
    std::string out;
    bool pending_sep = false;
    for (char c : name) {
        char l = char(std::tolower((unsigned char)c));
        bool ok = (l >= 'a' && l <= 'z') || (l >= '0' && l <= '9') ||
                  l == '_' || l == '-';
        if (ok) {
            if (pending_sep && !out.empty()) out += '_';
            pending_sep = false;
            out += l;
        } else {
            pending_sep = true;
        }
    }
    if (out.empty()) out = "f";
    return out;
}

namespace {

void write_literal_set(std::ostream& os, const LiteralSet& ls,
                       const std::vector<std::string>& names) {
    os << "(and";
    for (Literal l : ls) {
        os << " ";
        if (l.positive)
            os << "(" << names[std::size_t(l.fluent)] << ")";
        else
            os << "(not (" << names[std::size_t(l.fluent)] << "))";
    }
    os << ")";
}

} // namespace

PddlPair emit_pddl(const ClassicalProblem& p) {
    const ProblemCore& core = *p.core;
    PddlPair out;

    std::vector<std::string> fnames;
    for (std::size_t f = 0; f < core.fluents.size(); ++f) {
        std::string s = sanitize_pddl_name(core.fluents.name(FluentId(f)));
        auto [it, fresh] = out.fluent_names.emplace(s, core.fluents.name(FluentId(f)));
        if (!fresh)
            throw NameCollisionError("fluents " + it->second + " and " +
                                     core.fluents.name(FluentId(f)) +
                                     " collide as " + s);
        fnames.push_back(std::move(s));
    }

    std::ostringstream dom;
    dom << "(define (domain genplan)\n";
    dom << "  (:requirements :strips :negative-preconditions"
           " :conditional-effects)\n";
    dom << "  (:predicates";
    for (const std::string& s : fnames) dom << " (" << s << ")";
    dom << ")\n";
    for (const Action& a : core.actions) {
        std::string s = sanitize_pddl_name(a.name);
        auto [it, fresh] = out.action_names.emplace(s, a.name);
        if (!fresh)
            throw NameCollisionError("actions " + it->second + " and " +
                                     a.name + " collide as " + s);
        dom << "  (:action " << s << "\n";
        dom << "    :parameters ()\n";
        dom << "    :precondition ";
        write_literal_set(dom, a.precondition, fnames);
        dom << "\n    :effect (and";
        // canonical form: the merged unconditional literals first, then the
        // conditional rows in order
        LiteralSet plain;
        for (const ConditionalEffect& ce : a.effects)
            if (ce.condition.empty())
                for (Literal l : ce.effect) plain.add(l);
        for (Literal l : plain) {
            dom << " ";
            if (l.positive)
                dom << "(" << fnames[std::size_t(l.fluent)] << ")";
            else
                dom << "(not (" << fnames[std::size_t(l.fluent)] << "))";
        }
        for (const ConditionalEffect& ce : a.effects) {
            if (ce.condition.empty()) continue;
            dom << " (when ";
            write_literal_set(dom, ce.condition, fnames);
            dom << " ";
            write_literal_set(dom, ce.effect, fnames);
            dom << ")";
        }
        dom << ")\n  )\n";
    }
    dom << ")\n";
    out.domain_text = dom.str();

    std::ostringstream prob;
    prob << "(define (problem genplan-task)\n";
    prob << "  (:domain genplan)\n";
    prob << "  (:init";
    for (std::size_t f = 0; f < core.fluents.size(); ++f)
        if (p.initial.test(FluentId(f))) prob << " (" << fnames[f] << ")";
    prob << ")\n";
    prob << "  (:goal ";
    write_literal_set(prob, p.goal, fnames);
    prob << ")\n)\n";
    out.problem_text = prob.str();
    return out;
}

// -- Subset parser -----------------------------------------------------------

namespace {

struct SExpr {
    std::string atom;            // set when leaf
    std::vector<SExpr> children; // set when list
    bool is_atom() const { return children.empty() && !atom.empty(); }
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    SExpr parse() {
        skip_ws();
        SExpr e = parse_expr();
        skip_ws();
        return e;
    }

    bool at_end() {
        skip_ws();
        return pos_ >= text_.size();
    }

private:
    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else if (std::isspace((unsigned char)c)) {
                if (c == '\n') ++line_;
                ++pos_;
            } else {
                break;
            }
        }
    }

    SExpr parse_expr() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError(line_, "unexpected end");
        if (text_[pos_] == '(') {
            ++pos_;
            SExpr list;
            list.atom.clear();
            while (true) {
                skip_ws();
                if (pos_ >= text_.size())
                    throw ParseError(line_, "missing ')'");
                if (text_[pos_] == ')') {
                    ++pos_;
                    return list;
                }
                list.children.push_back(parse_expr());
            }
        }
        std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace((unsigned char)text_[pos_]) &&
               text_[pos_] != '(' && text_[pos_] != ')')
            ++pos_;
        if (start == pos_) throw ParseError(line_, "bad token");
        SExpr leaf;
        leaf.atom = text_.substr(start, pos_ - start);
        return leaf;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

const SExpr* find_section(const SExpr& define, const std::string& head) {
    for (const SExpr& c : define.children)
        if (!c.children.empty() && c.children[0].is_atom() &&
            c.children[0].atom == head)
            return &c;
    return nullptr;
}

Literal parse_literal(const SExpr& e, const ProblemCore& core) {
    if (e.children.size() == 2 && e.children[0].atom == "not") {
        Literal inner = parse_literal(e.children[1], core);
        return negate(inner);
    }
    if (e.children.size() != 1 || !e.children[0].is_atom())
        throw ParseError(0, "expected (fluent) literal");
    return pos(core.fluents.require(e.children[0].atom));
}

LiteralSet parse_literal_set(const SExpr& e, const ProblemCore& core) {
    LiteralSet out;
    if (e.children.empty()) throw ParseError(0, "expected (and ...)");
    if (e.children[0].atom != "and") {
        out.add(parse_literal(e, core));
        return out;
    }
    for (std::size_t i = 1; i < e.children.size(); ++i)
        out.add(parse_literal(e.children[i], core));
    return out;
}

} // namespace

ClassicalProblem parse_pddl(const std::string& domain_text,
                            const std::string& problem_text) {
    auto core = std::make_shared<ProblemCore>();

    Lexer dl(domain_text);
    SExpr dom = dl.parse();
    if (dom.children.size() < 2 || dom.children[0].atom != "define")
        throw ParseError(1, "expected (define (domain ...) ...)");
    const SExpr* preds = find_section(dom, ":predicates");
    if (!preds) throw ParseError(1, "missing (:predicates ...)");
    for (std::size_t i = 1; i < preds->children.size(); ++i) {
        const SExpr& c = preds->children[i];
        if (c.children.size() != 1 || !c.children[0].is_atom())
            throw ParseError(1, "predicates must be zero-arity");
        core->fluents.add(c.children[0].atom);
    }
    for (const SExpr& c : dom.children) {
        if (c.children.empty() || c.children[0].atom != ":action") continue;
        if (c.children.size() < 2 || !c.children[1].is_atom())
            throw ParseError(1, "action without name");
        Action a;
        a.name = c.children[1].atom;
        for (std::size_t i = 2; i + 1 < c.children.size(); i += 2) {
            const std::string key = c.children[i].atom;
            const SExpr& val = c.children[i + 1];
            if (key == ":parameters") {
                if (!val.children.empty())
                    throw ParseError(1, "only parameter-free actions");
            } else if (key == ":precondition") {
                a.precondition = parse_literal_set(val, *core);
            } else if (key == ":effect") {
                if (val.children.empty() || val.children[0].atom != "and")
                    throw ParseError(1, "effect must be (and ...)");
                LiteralSet plain;
                for (std::size_t q = 1; q < val.children.size(); ++q) {
                    const SExpr& item = val.children[q];
                    if (!item.children.empty() &&
                        item.children[0].atom == "when") {
                        if (item.children.size() != 3)
                            throw ParseError(1, "bad (when ...)");
                        a.effects.push_back(
                            {parse_literal_set(item.children[1], *core),
                             parse_literal_set(item.children[2], *core)});
                    } else {
                        plain.add(parse_literal(item, *core));
                    }
                }
                if (!plain.empty())
                    a.effects.insert(a.effects.begin(),
                                     {LiteralSet{}, std::move(plain)});
            } else {
                throw ParseError(1, "unknown action section " + key);
            }
        }
        core->add_action(std::move(a));
    }

    Lexer pl(problem_text);
    SExpr prob = pl.parse();
    if (prob.children.size() < 2 || prob.children[0].atom != "define")
        throw ParseError(1, "expected (define (problem ...) ...)");
    ClassicalProblem p;
    p.initial = State(core->fluents.size());
    const SExpr* init = find_section(prob, ":init");
    if (!init) throw ParseError(1, "missing (:init ...)");
    for (std::size_t i = 1; i < init->children.size(); ++i) {
        Literal l = parse_literal(init->children[i], *core);
        if (!l.positive) throw ParseError(1, "init lists true fluents only");
        p.initial.set(l.fluent, true);
    }
    const SExpr* goal = find_section(prob, ":goal");
    if (!goal || goal->children.size() != 2)
        throw ParseError(1, "missing (:goal ...)");
    p.goal = parse_literal_set(goal->children[1], *core);
    p.core = core;
    return p;
}

std::vector<std::string> parse_plan_file(const std::string& text) {
    std::vector<std::string> steps;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        if (line[b] == ';') continue;
        std::size_t e = line.find_last_not_of(" \t\r");
        std::string t = line.substr(b, e - b + 1);
        if (t.size() < 2 || t.front() != '(' || t.back() != ')')
            throw ParseError(line_no, "expected (action-name)");
        std::string name = t.substr(1, t.size() - 2);
        std::size_t nb = name.find_first_not_of(" \t");
        std::size_t ne = name.find_last_not_of(" \t");
        if (nb == std::string::npos)
            throw ParseError(line_no, "empty action name");
        name = name.substr(nb, ne - nb + 1);
        for (char& c : name) c = char(std::tolower((unsigned char)c));
        if (name.find_first_of(" \t()") != std::string::npos)
            throw ParseError(line_no, "expected a single action name");
        steps.push_back(std::move(name));
    }
    return steps;
}

// -- External planner adapter ---------------------------------------------------

namespace {

std::string replace_all(std::string s, const std::string& from,
                        const std::string& to) {
    std::size_t at = 0;
    while ((at = s.find(from, at)) != std::string::npos) {
        s.replace(at, from.size(), to);
        at += to.size();
    }
    return s;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::atomic<int> g_tmp_counter{0};

} // namespace

ExternalResult solve_external(const ClassicalProblem& p,
                              const PlannerCommand& cmd) {
    namespace fs = std::filesystem;
    for (const char* ph : {"{domain}", "{problem}", "{plan}"})
        if (cmd.command_template.find(ph) == std::string::npos)
            throw BadConfigError(std::string("planner command misses ") + ph);

    PddlPair pair = emit_pddl(p);

    const char* base_env = std::getenv("GENPLAN_TMPDIR");
    fs::path base = base_env && *base_env ? fs::path(base_env)
                                          : fs::temp_directory_path();
    fs::path dir = base / ("genplan_" + std::to_string(getpid()) + "_" +
                           std::to_string(g_tmp_counter.fetch_add(1)));
    fs::create_directories(dir);
    fs::path domain_path = dir / "domain.pddl";
    fs::path problem_path = dir / "problem.pddl";
    fs::path plan_path = dir / "plan.txt";
    fs::path output_path = dir / "output.log";
    {
        std::ofstream(domain_path) << pair.domain_text;
        std::ofstream(problem_path) << pair.problem_text;
    }

    std::string command = cmd.command_template;
    command = replace_all(command, "{domain}", domain_path.string());
    command = replace_all(command, "{problem}", problem_path.string());
    command = replace_all(command, "{plan}", plan_path.string());
    command += " > " + output_path.string() + " 2>&1";

    ExternalResult res;
    pid_t pid = fork();
    if (pid < 0) throw Error("fork failed");
    if (pid == 0) {
        if (!cmd.workdir.empty() && chdir(cmd.workdir.c_str()) != 0) _exit(127);
        execl("/bin/sh", "sh", "-c", command.c_str(), (char*)nullptr);
        _exit(127);
    }
    const double deadline = cmd.timeout_seconds;
    double waited = 0;
    int status = 0;
    bool finished = false;
    while (waited < deadline) {
        pid_t r = waitpid(pid, &status, WNOHANG);
        if (r == pid) {
            finished = true;
            break;
        }
        usleep(20'000);
        waited += 0.02;
    }
    if (!finished) {
        kill(pid, SIGKILL);
        waitpid(pid, &status, 0);
        res.kind = ExternalResult::Kind::Timeout;
        res.detail = "timed out after " + std::to_string(deadline) + "s";
        return res;
    }
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128;
    if (res.exit_code != 0) {
        res.kind = ExternalResult::Kind::NonzeroExit;
        res.detail = read_file(output_path);
        return res;
    }
    if (!fs::exists(plan_path)) {
        res.kind = ExternalResult::Kind::PlanInvalid;
        res.detail = "no plan file produced";
        return res;
    }

    std::vector<std::string> raw;
    try {
        raw = parse_plan_file(read_file(plan_path));
    } catch (const ParseError& e) {
        res.kind = ExternalResult::Kind::PlanInvalid;
        res.detail = e.what();
        return res;
    }
    std::vector<std::string> steps;
    for (const std::string& name : raw) {
        auto it = pair.action_names.find(name);
        if (it == pair.action_names.end()) {
            res.kind = ExternalResult::Kind::PlanInvalid;
            res.detail = "plan step not in task: " + name;
            return res;
        }
        steps.push_back(it->second);
    }
    ValidationResult val = validate_plan(p, steps);
    if (!val.solved) {
        res.kind = ExternalResult::Kind::PlanInvalid;
        res.detail = "step " + std::to_string(val.violation_step) + ": " +
                     val.reason;
        return res;
    }
    res.kind = ExternalResult::Kind::Ok;
    res.plan.steps = std::move(steps);
    res.plan.trace = std::move(val.trace);
    return res;
}

} // namespace genplan
