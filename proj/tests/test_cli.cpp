#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

namespace {

namespace fs = std::filesystem;

struct CliResult {
    int exit_code;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    std::string cmd = std::string(GENPLAN_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : 128, out};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() /
                   ("genplan_cli_" + tag + "_" + std::to_string(getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("cli compile emits deterministic files") {
    fs::path a = fresh_dir("ca"), b = fresh_dir("cb");
    CliResult r1 = run_cli("compile --domain summatory --lines 3 --out " +
                           a.string());
    CliResult r2 = run_cli("compile --domain summatory --lines 3 --out " +
                           b.string());
    CHECK(r1.exit_code == 0);
    CHECK(r2.exit_code == 0);
    for (const char* f : {"domain.pddl", "problem.pddl", "decode.json"}) {
        CAPTURE(f);
        CHECK(slurp(a / f) == slurp(b / f));
        CHECK(!slurp(a / f).empty());
    }
    // split mode: goto machinery is (|pool| + n) * n = (1 + 3) * 3
    CHECK(r1.output.find("goto machinery: 12") != std::string::npos);
}

TEST_CASE("cli synth, run and verify round trip through files") {
    fs::path dir = fresh_dir("synth");
    CliResult synth = run_cli(
        "synth --domain summatory --lines 3 --max-seconds 120 --out " +
        dir.string());
    CHECK(synth.exit_code == 0);
    CHECK(synth.output.find("verified") != std::string::npos);
    CHECK(fs::exists(dir / "program.txt"));

    CliResult verify = run_cli("verify --domain summatory --program " +
                               (dir / "program.txt").string());
    CHECK(verify.exit_code == 0);
    CHECK(verify.output.find("all instances solved") != std::string::npos);

    CliResult traced = run_cli("run --domain summatory --trace --program " +
                               (dir / "program.txt").string());
    CHECK(traced.exit_code == 0);
    CHECK(traced.output.find("add_y_n") != std::string::npos);
}

TEST_CASE("cli exit codes") {
    // 4: configuration problems
    CHECK(run_cli("synth --domain no_such_domain").exit_code == 4);
    CHECK(run_cli("compile --domain summatory --lines 0 --out /tmp/gp_x")
              .exit_code == 4);
    // 2: bound too tight (unsolvable within bounds)
    fs::path dir = fresh_dir("tight");
    CHECK(run_cli("synth --domain summatory --lines 1 --bfs --out " +
                  dir.string())
              .exit_code == 2);
    // 3: a program that is not a solution
    std::ofstream(dir / "bad.txt")
        << "proc main {\n 0. dec_n\n 1. end\n}\n";
    CHECK(run_cli("verify --domain summatory --program " +
                  (dir / "bad.txt").string())
              .exit_code == 3);
}

TEST_CASE("cli enumerate cross-checks against the compiled task") {
    CliResult r = run_cli(
        "enumerate --domain grid_to_origin --params \"xs=1;ys=1\" --lines 3 "
        "--max-results 2 --cross-check");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("solution 1:") != std::string::npos);
    CHECK(r.output.find("cross-check: enumerator yes, compiled task yes") !=
          std::string::npos);
}

TEST_CASE("cli pipeline synthesizes sorting end to end") {
    fs::path dir = fresh_dir("pipe");
    CliResult r = run_cli(
        "pipeline --domain sorting --main-lines 4 --subtask-lines 4 "
        "--stack 2 --max-seconds 900 --out " +
        dir.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("proc p1") != std::string::npos);
    std::string prog = slurp(dir / "program.txt");
    CHECK(prog.find("call p1") != std::string::npos);
}

TEST_CASE("cli manifest drives synthesis and rejects bad fields") {
    fs::path dir = fresh_dir("manifest");
    std::ofstream(dir / "suite.json") << R"({
  "domain": "summatory",
  "params": {"values": "2,3"},
  "lines": 3,
  "split": true,
  "max_seconds": 120,
  "out": ")" << (dir / "out").string() << R"("
})";
    CliResult ok = run_cli("synth --manifest " + (dir / "suite.json").string());
    CHECK(ok.exit_code == 0);

    std::ofstream(dir / "bad.json") << R"({"domain": "summatory", "linez": 3})";
    CliResult bad = run_cli("synth --manifest " + (dir / "bad.json").string());
    CHECK(bad.exit_code == 4);
    CHECK(bad.output.find("linez") != std::string::npos);

    std::ofstream(dir / "bad2.json") << R"({"domain": "summatory", "lines": "x"})";
    CHECK(run_cli("synth --manifest " + (dir / "bad2.json").string())
              .exit_code == 4);
}

TEST_CASE("cli dck injection from a program file") {
    fs::path dir = fresh_dir("dck");
    std::ofstream(dir / "list.prog") << R"(
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
)";
    CliResult r = run_cli(
        "synth --domain list_visit --params \"lengths=1,3,5\" --lines 2 "
        "--stack 8 --max-depth 8 --condition cur_is_tail --dck " +
        (dir / "list.prog").string() + " --out " + (dir / "out").string());
    CHECK(r.exit_code == 0);
    std::string prog = slurp(dir / "out" / "program.txt");
    CHECK(prog.find("call p1") != std::string::npos);
}

TEST_CASE("cli manifest with explicit instances") {
    fs::path dir = fresh_dir("inst");
    std::ofstream(dir / "suite.json") << R"({
  "domain": "grid_to_origin",
  "lines": 4,
  "instances": [
    {"init": ["x_eq_3", "y_eq_1"], "goal": ["x_eq_0", "y_eq_0"]},
    {"init": ["x_eq_1", "y_eq_3"], "goal": ["x_eq_0", "y_eq_0"]}
  ],
  "max_seconds": 120,
  "out": ")" << (dir / "out").string() << R"("
})";
    CliResult r = run_cli("synth --manifest " + (dir / "suite.json").string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("verified on 2 training instance(s)") !=
          std::string::npos);

    std::ofstream(dir / "bad.json") << R"({
  "domain": "grid_to_origin",
  "instances": [{"init": ["no_such_fluent"], "goal": ["x_eq_0"]}]
})";
    CHECK(run_cli("synth --manifest " + (dir / "bad.json").string())
              .exit_code == 4);
}

TEST_CASE("cli synth through an external planner command") {
    fs::path dir = fresh_dir("ext");
    CliResult r = run_cli(
        "synth --domain summatory --lines 3 --out " + dir.string() +
        " --planner-cmd '" + std::string(GENPLAN_CLI_PATH) +
        " self-solve {domain} {problem} {plan}'");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("verified") != std::string::npos);
}
