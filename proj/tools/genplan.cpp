// Command-line surface: compile program-synthesis tasks to PDDL, synthesize
// and verify programs with the internal planner or an external one, run the
// divide-and-conquer pipeline, execute program files on benchmark instances,
// enumerate programs by brute force, and serve as a file-contract planner
// (self-solve) for adapter tests.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "genplan/compile.hpp"
#include "genplan/domains.hpp"
#include "genplan/pddl.hpp"
#include "genplan/planner.hpp"
#include "genplan/program.hpp"
#include "genplan/synth.hpp"

using nlohmann::json;
using namespace genplan;

namespace {

constexpr int kExitSolved = 0;
constexpr int kExitLimit = 2;
constexpr int kExitVerification = 3;
constexpr int kExitConfig = 4;

struct Options {
    std::string manifest;
    std::string domain;
    std::string params; // key=value;key=value
    int lines = 3;
    int procs = 0;
    int stack = 1;
    bool split = true;
    bool one_level = false;
    std::vector<std::string> condition_pool;
    std::vector<std::string> dck_files;
    std::string planner_cmd;
    double planner_timeout = 600.0;
    double max_seconds = 600.0;
    long max_expansions = 50'000'000;
    int max_depth = 12;
    long max_steps = 1'000'000;
    bool no_holdout = false;
    bool use_bfs = false;
    bool trace = false;
    std::string out_dir = ".";
    std::string program_file;
    int main_lines = -1;
    int subtask_lines = -1;
    long max_results = 10;
    bool cross_check = false;
    // manifest-only: explicit instances replacing the recipe's defaults
    json instances;
};

std::map<std::string, std::string> parse_params(const std::string& text) {
    std::map<std::string, std::string> out;
    std::stringstream ss(text);
    std::string piece;
    while (std::getline(ss, piece, ';')) {
        if (piece.empty()) continue;
        std::size_t eq = piece.find('=');
        if (eq == std::string::npos)
            throw BadConfigError("params entry must be key=value: " + piece);
        out[piece.substr(0, eq)] = piece.substr(eq + 1);
    }
    return out;
}

template <typename T>
void manifest_get(const json& j, const char* key, T& into) {
    if (!j.contains(key)) return;
    try {
        into = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw BadConfigError(std::string("manifest field '") + key +
                             "' has the wrong type");
    }
}

void apply_manifest(Options& o) {
    if (o.manifest.empty()) return;
    std::ifstream in(o.manifest);
    if (!in) throw BadConfigError("cannot open manifest " + o.manifest);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw BadConfigError(std::string("manifest: ") + e.what());
    }
    static const std::set<std::string> known{
        "domain", "params", "lines", "procs", "stack", "split",
        "one_level", "condition_pool", "dck", "planner_cmd",
        "planner_timeout", "max_seconds", "max_expansions", "max_depth",
        "max_steps", "no_holdout", "main_lines", "subtask_lines", "out",
        "instances"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw BadConfigError("manifest: unknown field '" + it.key() + "'");
    manifest_get(j, "domain", o.domain);
    if (j.contains("params")) {
        if (!j["params"].is_object())
            throw BadConfigError("manifest field 'params' must be an object");
        std::string flat;
        for (auto it = j["params"].begin(); it != j["params"].end(); ++it) {
            std::string v = it.value().is_string()
                                ? it.value().get<std::string>()
                                : it.value().dump();
            flat += (flat.empty() ? "" : ";") + it.key() + "=" + v;
        }
        o.params = flat;
    }
    manifest_get(j, "lines", o.lines);
    manifest_get(j, "procs", o.procs);
    manifest_get(j, "stack", o.stack);
    manifest_get(j, "split", o.split);
    manifest_get(j, "one_level", o.one_level);
    manifest_get(j, "condition_pool", o.condition_pool);
    manifest_get(j, "dck", o.dck_files);
    manifest_get(j, "planner_cmd", o.planner_cmd);
    manifest_get(j, "planner_timeout", o.planner_timeout);
    manifest_get(j, "max_seconds", o.max_seconds);
    manifest_get(j, "max_expansions", o.max_expansions);
    manifest_get(j, "max_depth", o.max_depth);
    manifest_get(j, "max_steps", o.max_steps);
    manifest_get(j, "no_holdout", o.no_holdout);
    manifest_get(j, "main_lines", o.main_lines);
    manifest_get(j, "subtask_lines", o.subtask_lines);
    manifest_get(j, "out", o.out_dir);
    if (j.contains("instances")) {
        if (!j["instances"].is_array() || j["instances"].empty())
            throw BadConfigError(
                "manifest field 'instances' must be a non-empty array");
        o.instances = j["instances"];
    }
    if (o.lines < 1 || o.stack < 1 || o.procs < 0)
        throw BadConfigError("manifest: lines/stack must be >= 1, procs >= 0");
}

// Explicit manifest instances: {"init": [fluent...], "goal": [fluent or
// !fluent ...]} over the domain's fluent table.
void apply_instances(const json& list, GeneralizedProblem& gp) {
    std::vector<Instance> out;
    for (const json& item : list) {
        if (!item.is_object() || !item.contains("init") ||
            !item.contains("goal"))
            throw BadConfigError(
                "each instance needs 'init' and 'goal' arrays");
        Instance inst;
        inst.initial = State(gp.core->fluents.size());
        for (const json& f : item.at("init")) {
            if (!f.is_string())
                throw BadConfigError("instance init entries must be strings");
            inst.initial.set(gp.core->fluents.require(f.get<std::string>()),
                             true);
        }
        for (const json& f : item.at("goal")) {
            if (!f.is_string())
                throw BadConfigError("instance goal entries must be strings");
            std::string name = f.get<std::string>();
            bool positive = true;
            if (!name.empty() && name[0] == '!') {
                positive = false;
                name = name.substr(1);
            }
            inst.goal.add({gp.core->fluents.require(name), positive});
        }
        out.push_back(std::move(inst));
    }
    gp.instances = std::move(out);
}

DomainRecipe load_recipe(const Options& o) {
    if (o.domain.empty()) throw BadConfigError("no domain given");
    DomainRecipe recipe = make_domain(o.domain, parse_params(o.params));
    if (!o.instances.is_null()) {
        apply_instances(o.instances, recipe.gp);
        recipe.holdout.reset(); // defaults no longer describe this suite
        recipe.subtasks.reset();
    }
    return recipe;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<ProcedureDef> load_dck(const Options& o, const ProblemCore& core) {
    std::vector<ProcedureDef> aux;
    for (const std::string& path : o.dck_files) {
        PlanningProgram prog = parse_program(read_file(path), core);
        for (std::size_t j = 1; j < prog.procs.size(); ++j)
            aux.push_back(prog.procs[j]);
    }
    return aux;
}

std::vector<FluentId> pool_from(const Options& o, const DomainRecipe& recipe) {
    if (o.condition_pool.empty()) return recipe.gp.condition_pool;
    std::vector<FluentId> pool;
    for (const std::string& name : o.condition_pool)
        pool.push_back(recipe.gp.core->fluents.require(name));
    return pool;
}

CompilationConfig config_from(const Options& o, const DomainRecipe& recipe,
                              const std::vector<ProcedureDef>& dck) {
    CompilationConfig cfg;
    cfg.lines = o.lines;
    cfg.procs = std::max<int>(o.procs, int(dck.size()));
    cfg.stack = o.stack;
    cfg.split = o.split;
    cfg.one_level_only = o.one_level;
    cfg.condition_pool = pool_from(o, recipe);
    if (!dck.empty()) {
        cfg.signatures.push_back({"main", {}});
        for (const ProcedureDef& p : dck)
            cfg.signatures.push_back({p.name, p.params});
    }
    return cfg;
}

const char* kind_name(CompiledActionKind k) {
    switch (k) {
    case CompiledActionKind::Program: return "program";
    case CompiledActionKind::Repeat: return "repeat";
    case CompiledActionKind::Call: return "call";
    case CompiledActionKind::End: return "end";
    case CompiledActionKind::Eval: return "eval";
    case CompiledActionKind::Jmp: return "jmp";
    }
    return "?";
}

int cmd_compile(const Options& o) {
    DomainRecipe recipe = load_recipe(o);
    std::vector<ProcedureDef> dck = load_dck(o, *recipe.gp.core);
    CompilationConfig cfg = config_from(o, recipe, dck);
    for (const ProcedureDef& p : dck)
        for (const auto& line : p.lines)
            if (line && line->kind == Instruction::Kind::Goto)
                cfg.extra_condition_pool.push_back(line->condition);
    if (!dck.empty()) {
        cfg.proc_lines.push_back(cfg.lines);
        for (const ProcedureDef& p : dck)
            cfg.proc_lines.push_back(std::max(1, int(p.lines.size()) - 1));
    }

    CompiledTask task =
        (cfg.procs == 0 && cfg.stack == 1 && dck.empty())
            ? compile_flat(recipe.gp, cfg.lines, cfg.condition_pool, cfg.split)
            : compile_nested(recipe.gp, cfg);
    if (!dck.empty()) task = inject_dck(task, dck);

    PddlPair pair = emit_pddl(task.task);
    std::filesystem::create_directories(o.out_dir);
    std::ofstream(o.out_dir + "/domain.pddl") << pair.domain_text;
    std::ofstream(o.out_dir + "/problem.pddl") << pair.problem_text;

    json dec;
    dec["domain"] = recipe.name;
    dec["lines"] = task.config.lines;
    dec["procs"] = task.config.procs;
    dec["stack"] = task.config.stack;
    dec["split"] = task.config.split;
    json actions = json::object();
    for (const Action& a : task.task.core->actions) {
        const DecodeEntry& e = task.decode.at(a.name);
        json row;
        row["kind"] = kind_name(e.kind);
        row["line"] = e.line;
        row["proc"] = e.proc;
        row["level"] = e.level;
        if (e.payload)
            row["instruction"] =
                format_instruction(*e.payload, *task.source, nullptr);
        actions[sanitize_pddl_name(a.name)] = row;
    }
    dec["actions"] = actions;
    std::ofstream(o.out_dir + "/decode.json") << dec.dump(2) << "\n";

    std::cout << "wrote " << o.out_dir << "/domain.pddl, problem.pddl, decode.json\n"
              << "fluents: " << task.task.core->fluents.size()
              << "  actions: " << task.task.core->actions.size()
              << "  goto machinery: " << task.goto_machinery_count() << "\n";
    return kExitSolved;
}

void print_program(const PlanningProgram& prog, const ProblemCore& core,
                   const Options& o) {
    std::string text = format_program(prog, core);
    std::cout << text;
    if (!o.out_dir.empty()) {
        std::filesystem::create_directories(o.out_dir);
        std::ofstream(o.out_dir + "/program.txt") << text;
    }
}

int cmd_synth(const Options& o) {
    DomainRecipe recipe = load_recipe(o);
    std::vector<ProcedureDef> dck = load_dck(o, *recipe.gp.core);

    SynthRequest req;
    req.gp = recipe.gp;
    if (!o.no_holdout && recipe.holdout) req.holdout = recipe.holdout;
    req.cfg = config_from(o, recipe, dck);
    req.dck = dck;
    req.limits.max_seconds = o.max_seconds;
    req.limits.max_expansions = o.max_expansions;
    req.run_limits.max_depth = o.max_depth;
    req.run_limits.max_steps = o.max_steps;
    req.planner_cmd = o.planner_cmd;
    req.planner_timeout = o.planner_timeout;
    req.use_bfs = o.use_bfs;

    SynthOutcome out = synthesize(req);
    BenchReport report;
    report.kind = out.status == SynthStatus::Solved
                      ? classify_program(out.program)
                      : SolutionKind::ME;
    report.rows.push_back({"main", out.used_lines,
                           int(recipe.gp.instances.size()), out.stats.seconds,
                           out.stats.plan_length,
                           out.status == SynthStatus::Solved ? "" : "ME"});
    std::cout << report.render();
    switch (out.status) {
    case SynthStatus::Solved:
        std::cout << "verified on " << recipe.gp.instances.size()
                  << " training instance(s)";
        if (req.holdout)
            std::cout << " and " << req.holdout->instances.size()
                      << " held-out instance(s)";
        std::cout << "\n";
        print_program(out.program, *recipe.gp.core, o);
        return kExitSolved;
    case SynthStatus::Limit:
        std::cout << "limit: " << out.detail << "\n";
        return kExitLimit;
    case SynthStatus::Unsolvable:
        std::cout << "unsolvable within bounds\n";
        return kExitLimit;
    case SynthStatus::VerificationFailed:
        std::cout << "verification failed: " << out.detail << "\n";
        return kExitVerification;
    }
    return kExitConfig;
}

int cmd_pipeline(const Options& o) {
    DomainRecipe recipe = load_recipe(o);
    PipelineRequest req;
    req.recipe = recipe;
    req.main_lines = o.main_lines > 0 ? o.main_lines : o.lines;
    if (o.subtask_lines > 0) req.subtask_lines = o.subtask_lines;
    req.stack = o.stack;
    req.split = o.split;
    req.limits.max_seconds = o.max_seconds;
    req.limits.max_expansions = o.max_expansions;
    req.main_limits = req.limits;
    req.run_limits.max_depth = o.max_depth;
    req.run_limits.max_steps = o.max_steps;
    req.planner_cmd = o.planner_cmd;
    req.planner_timeout = o.planner_timeout;

    PipelineOutcome out = run_pipeline(req);
    std::cout << out.report.render();
    if (!out.solved) {
        std::cout << "failed at stage: " << out.failed_stage << "\n";
        return out.status == SynthStatus::VerificationFailed
                   ? kExitVerification
                   : kExitLimit;
    }
    // the pipeline's product is verified end to end before we report success
    SolveReport final_check =
        solves(out.program, recipe.gp,
               {o.max_depth, o.max_steps, false});
    if (!final_check.solved) {
        std::cout << "final verification failed\n";
        return kExitVerification;
    }
    print_program(out.program, *recipe.gp.core, o);
    return kExitSolved;
}

int cmd_run(const Options& o) {
    DomainRecipe recipe = load_recipe(o);
    if (o.program_file.empty()) throw BadConfigError("--program required");
    PlanningProgram prog =
        parse_program(read_file(o.program_file), *recipe.gp.core);
    ExecLimits limits{o.max_depth, o.max_steps, o.trace};
    bool all = true;
    for (std::size_t t = 0; t < recipe.gp.instances.size(); ++t) {
        RunOutcome out = run_program(prog, recipe.gp.instance_problem(t), limits);
        bool ok = out.terminated() &&
                  out.final_state.satisfies(recipe.gp.instances[t].goal);
        all = all && ok;
        std::cout << "instance " << t << ": " << to_string(out.status)
                  << (out.terminated() ? (ok ? ", goal ok" : ", goal not met")
                                       : "")
                  << " (" << out.steps << " steps)\n";
        if (o.trace)
            for (const TraceStep& ts : out.trace)
                std::cout << "  [" << ts.level << "] " << "p" << ts.proc << ":"
                          << ts.pc << "  " << ts.text << "\n";
    }
    std::cout << (all ? "all instances solved\n" : "not a solution\n");
    return all ? kExitSolved : kExitVerification;
}

int cmd_enumerate(const Options& o) {
    DomainRecipe recipe = load_recipe(o);
    std::vector<int> actions;
    for (std::size_t a = 0; a < recipe.gp.core->actions.size(); ++a)
        actions.push_back(int(a));
    std::vector<FluentId> pool = pool_from(o, recipe);
    ExecLimits limits{o.max_depth, o.max_steps, false};
    long found = 0;
    enumerate_programs(recipe.gp, o.lines, actions, pool, limits,
                       [&](const PlanningProgram& prog) {
                           ++found;
                           std::cout << "solution " << found << ":\n"
                                     << format_program(prog, *recipe.gp.core);
                           return found < o.max_results;
                       });
    std::cout << found << " solving program(s)\n";
    if (o.cross_check) {
        CompiledTask task =
            compile_flat(recipe.gp, o.lines, pool, o.split);
        SolveResult res = bfs_solve(task.task, {o.max_expansions, o.max_seconds,
                                                20'000'000});
        if (res.status == SolveStatus::LimitHit) {
            std::cout << "cross-check inconclusive (limit)\n";
            return kExitLimit;
        }
        bool planner_solves = res.status == SolveStatus::Solved;
        std::cout << "cross-check: enumerator " << (found > 0 ? "yes" : "no")
                  << ", compiled task " << (planner_solves ? "yes" : "no")
                  << "\n";
        if (planner_solves != (found > 0)) {
            std::cout << "cross-check disagreement\n";
            return kExitVerification;
        }
    }
    return kExitSolved;
}

int cmd_self_solve(const std::string& domain_path,
                   const std::string& problem_path,
                   const std::string& plan_path, bool use_bfs,
                   double max_seconds) {
    ClassicalProblem p =
        parse_pddl(read_file(domain_path), read_file(problem_path));
    SearchLimits limits;
    limits.max_seconds = max_seconds;
    SolveResult res = use_bfs ? bfs_solve(p, limits) : gbfs_solve(p, limits);
    if (res.status == SolveStatus::Solved) {
        std::ofstream out(plan_path);
        for (const std::string& step : res.plan.steps)
            out << "(" << step << ")\n";
        out << "; steps = " << res.plan.steps.size() << "\n";
        std::cout << "plan written to " << plan_path << "\n";
        return kExitSolved;
    }
    std::cout << (res.status == SolveStatus::Unsolvable ? "unsolvable\n"
                                                        : "limit\n");
    return res.status == SolveStatus::Unsolvable ? 1 : kExitLimit;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"generalized-planning toolkit: planning programs with "
                 "procedures, compiled to classical planning"};
    app.require_subcommand(1);

    Options o;
    auto add_common = [&](CLI::App* cmd, bool with_bounds = true) {
        cmd->add_option("--manifest", o.manifest, "JSON manifest file");
        cmd->add_option("--domain", o.domain, "benchmark domain name");
        cmd->add_option("--params", o.params, "domain parameters key=val;...");
        if (with_bounds) {
            cmd->add_option("--lines", o.lines, "program lines per procedure");
            cmd->add_option("--procs", o.procs, "auxiliary procedures");
            cmd->add_option("--stack", o.stack, "stack bound");
            cmd->add_flag("--split,!--no-split", o.split,
                          "split gotos into eval/jmp");
            cmd->add_flag("--one-level", o.one_level,
                          "calls only from main (stack fixed at 2)");
            cmd->add_option("--condition", o.condition_pool,
                            "goto condition fluents (default: domain pool)");
            cmd->add_option("--dck", o.dck_files,
                            "program files injected as procedures");
        }
        cmd->add_option("--max-seconds", o.max_seconds, "search time limit");
        cmd->add_option("--max-expansions", o.max_expansions, "");
        cmd->add_option("--max-depth", o.max_depth, "interpreter stack bound");
        cmd->add_option("--max-steps", o.max_steps, "interpreter step budget");
        cmd->add_option("--out", o.out_dir, "output directory");
    };

    CLI::App* c_compile = app.add_subcommand("compile", "emit PDDL + decode table");
    add_common(c_compile);

    CLI::App* c_synth = app.add_subcommand("synth", "synthesize a program");
    add_common(c_synth);
    c_synth->add_option("--planner-cmd", o.planner_cmd,
                        "external planner: template with {domain} {problem} {plan}");
    c_synth->add_option("--planner-timeout", o.planner_timeout, "");
    c_synth->add_flag("--no-holdout", o.no_holdout,
                      "skip held-out verification");
    c_synth->add_flag("--bfs", o.use_bfs, "internal breadth-first oracle");

    CLI::App* c_pipe = app.add_subcommand(
        "pipeline", "synthesize subtask procedures, then main");
    add_common(c_pipe);
    c_pipe->add_option("--main-lines", o.main_lines, "line bound for main");
    c_pipe->add_option("--subtask-lines", o.subtask_lines,
                       "line bound for subtasks");
    c_pipe->add_option("--planner-cmd", o.planner_cmd, "");
    c_pipe->add_option("--planner-timeout", o.planner_timeout, "");

    CLI::App* c_run = app.add_subcommand("run", "run a program file");
    add_common(c_run, false);
    c_run->add_option("--program", o.program_file, "program file")->required();
    c_run->add_flag("--trace", o.trace, "print executed instructions");

    CLI::App* c_verify = app.add_subcommand("verify", "verify a program file");
    add_common(c_verify, false);
    c_verify->add_option("--program", o.program_file, "program file")
        ->required();

    CLI::App* c_enum = app.add_subcommand(
        "enumerate", "brute-force solving programs (oracle)");
    add_common(c_enum);
    c_enum->add_option("--max-results", o.max_results, "");
    c_enum->add_flag("--cross-check", o.cross_check,
                     "compare against the compiled task");

    std::string ss_domain, ss_problem, ss_plan;
    bool ss_bfs = false;
    double ss_seconds = 600.0;
    CLI::App* c_self = app.add_subcommand(
        "self-solve", "solve a PDDL pair with the internal planner");
    c_self->add_option("domain", ss_domain)->required();
    c_self->add_option("problem", ss_problem)->required();
    c_self->add_option("plan", ss_plan)->required();
    c_self->add_flag("--bfs", ss_bfs);
    c_self->add_option("--max-seconds", ss_seconds);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        apply_manifest(o);
        if (c_compile->parsed()) return cmd_compile(o);
        if (c_synth->parsed()) return cmd_synth(o);
        if (c_pipe->parsed()) return cmd_pipeline(o);
        if (c_run->parsed()) return cmd_run(o);
        if (c_verify->parsed()) {
            o.trace = false;
            return cmd_run(o);
        }
        if (c_enum->parsed()) return cmd_enumerate(o);
        if (c_self->parsed())
            return cmd_self_solve(ss_domain, ss_problem, ss_plan, ss_bfs,
                                  ss_seconds);
    } catch (const BadConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
