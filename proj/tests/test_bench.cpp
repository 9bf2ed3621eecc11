#include "pamp/bench.hpp"
#include "pamp/formats.hpp"
#include "support.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace pamp;
using test::q;
namespace fs = std::filesystem;

namespace
{

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

/// Runs the CLI and returns its exit code; output goes to `log`.
int cli(const std::string& args, const fs::path& log)
{
    std::string cmd = std::string(PAMP_CLI) + " " + args + " > " + log.string() + " 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct TempDir
{
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("pamp-test-" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

RunRecord rec(std::string inst, Family f, std::string mode, ReportVerdict v, double t)
{
    RunRecord r;
    r.instance = std::move(inst);
    r.family = f;
    r.mode = std::move(mode);
    r.verdict = v;
    r.wall_seconds = t;
    return r;
}

std::size_t rows(const std::string& csv) { return static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) - 1; }

} // namespace

TEST_SUITE("generators")
{
    TEST_CASE("the running-example bundle")
    {
        auto b = gen_factory(1, 2, 50, 2);
        const auto& ta = b.model.platform;
        CHECK(ta.locations == std::vector<std::string>{"OFF", "P_STARTED", "W_STARTING", "W_STARTED", "W_RESUMING",
                                                       "W_ENDED", "P_ENDED", "BAD", "C_STARTED"});
        CHECK(ta.clocks == std::vector<std::string>{"gamma", "c_P", "c_W", "c", "c_C"});
        CHECK(b.model.kappa == 2);
        const auto& tp = b.model.problem;
        std::vector<std::string> names;
        for (const auto& a : tp.actions)
            names.push_back(a.name);
        CHECK(names == std::vector<std::string>{"Process", "Work#1", "Work#2", "Cooldown"});
        CHECK_FALSE(tp.actions[0].dur_hi); // the deadline lives in the automaton
        CHECK(tp.actions[1].dur_lo == 20);
        CHECK(tp.actions[3].dur_lo == 2);

        auto verdict = [&](std::vector<std::tuple<std::string, Rational, Rational>> e) {
            return validate_plan(b.model, test::factory_plan(tp, std::move(e))).kind;
        };
        CHECK(verdict({{"P", q(0), q(55)}, {"W", q(1), q(20)}, {"W", q(32), q(20)}}) == Verdict::Kind::Unsafe);
        CHECK(verdict({{"P", q(0), q(45)}, {"W", q(1), q(20)}, {"W", q(22), q(20)}}) == Verdict::Kind::NonExecutable);
        CHECK(verdict({{"P", q(0), q(45)}, {"W", q(1), q(20)}, {"C", q(22), q(2)}, {"W", q(49, 2), q(20)}}) ==
              Verdict::Kind::Solution);
    }

    TEST_CASE("deterministic, distinct and well-formed")
    {
        std::set<std::string> ids;
        for (const auto& spec : desk_suite()) {
            CAPTURE(spec.id());
            CHECK(ids.insert(spec.id()).second);
            CHECK(serialize_problem_bundle(generate(spec)) == serialize_problem_bundle(generate(spec)));
        }
        CHECK(ids.size() == desk_suite().size());
    }

    TEST_CASE("desk suite covers the three families at both trace ratios")
    {
        std::set<std::tuple<Family, int, int>> cells;
        for (const auto& s : desk_suite())
            cells.insert({s.family, s.family == Family::Rover ? s.locations : s.works, s.kappa});
        for (int kappa : {2, 3}) {
            for (int w : {1, 2, 3}) {
                CHECK(cells.count({Family::Factory1, w, kappa}));
                CHECK(cells.count({Family::Factory2, w, kappa}));
            }
            for (int n : {3, 4, 5})
                CHECK(cells.count({Family::Rover, n, kappa}));
        }
    }

    TEST_CASE("parameter errors")
    {
        CHECK_THROWS_AS(gen_factory(3, 2, 50, 2), std::invalid_argument);
        CHECK_THROWS_AS(gen_factory(1, 0, 50, 2), std::invalid_argument);
        CHECK_THROWS_AS(gen_rover(3, {3}, 2), std::invalid_argument);
        CHECK_THROWS_AS(gen_rover(1, {}, 2), std::invalid_argument);
        for (auto f : {Family::Factory1, Family::Factory2, Family::Rover})
            CHECK(parse_family(to_string(f)) == f);
        CHECK_FALSE(parse_family("mars"));
    }

    TEST_CASE("rover without messages needs no platform care")
    {
        auto b = gen_rover(3, {}, 2);
        CHECK(b.model.problem.goal.size() == 1);
        CHECK_NOTHROW(b.model.check());
    }

    TEST_CASE("synchronous product")
    {
        Component a;
        a.add_location("A0");
        a.add_location("A1", "x <= 2");
        a.initial = "A0";
        a.edges.push_back({"A0", "A1", "start(Go)", "true", {"x"}});
        a.edges.push_back({"A1", "A0", "tau", "x >= 1", {}});
        Component b;
        b.add_location("B0");
        b.add_location("B1");
        b.initial = "B0";
        b.edges.push_back({"B0", "B1", "start(Go)", "true", {}});
        Component p = compose(a, b);
        CHECK(p.locations.size() == 4);
        CHECK(p.initial == "A0.B0");
        auto it = std::find(p.locations.begin(), p.locations.end(), "A1.B1");
        REQUIRE(it != p.locations.end());
        CHECK(p.invariants[static_cast<std::size_t>(it - p.locations.begin())] == "x <= 2");
        int sync = 0, inter = 0;
        for (const auto& e : p.edges) {
            if (e.label == "start(Go)") {
                ++sync;
                CHECK(e.from == "A0.B0");
                CHECK(e.to == "A1.B1");
            } else {
                ++inter;
                CHECK(e.label == "tau");
            }
        }
        CHECK(sync == 1);
        CHECK(inter == 2); // tau from A1.B0 and A1.B1
    }
}

TEST_SUITE("result tables")
{
    TEST_CASE("coverage counts timeouts as unsolved")
    {
        std::vector<RunRecord> rs{rec("f1", Family::Factory1, "enc", ReportVerdict::Solution, 3.0),
                                  rec("f1", Family::Factory1, "ref", ReportVerdict::Solution, 1.0),
                                  rec("f2", Family::Factory1, "enc", ReportVerdict::Unknown, 120.0),
                                  rec("f2", Family::Factory1, "ref", ReportVerdict::Solution, 2.5)};
        auto t = emit_results(rs, 120);
        CHECK(t.coverage == "family,kappa,mode,instances,solved\n"
                            "factory1,2,enc,2,1\n"
                            "factory1,2,ref,2,2\n");
        CHECK(t.cactus == "mode,rank,wall_seconds\nenc,1,3.000\nref,1,1.000\nref,2,2.500\n");
        CHECK(t.scatter == "instance,enc_seconds,ref_seconds\nf1,3.000,1.000\nf2,120.000,2.500\n");
        CHECK(rows(t.runs) == 4);
        CHECK(emit_results(rs, 120).runs == t.runs);
        CHECK_THROWS_AS(emit_results({}, 1), std::invalid_argument);
    }

    TEST_CASE("runs table round-trips")
    {
        std::vector<RunRecord> rs{rec("r3", Family::Rover, "ref", ReportVerdict::Solution, 0.25),
                                  rec("r3", Family::Rover, "enc", ReportVerdict::NoSolutionWithinBound, 7.0)};
        rs[0].solver_calls = 9;
        rs[0].iterations = 2;
        rs[0].bound = 8;
        rs[1].kappa = 3;
        auto t = emit_results(rs, 60);
        auto back = parse_run_records(t.runs);
        REQUIRE(back.ok());
        REQUIRE(back.value->size() == 2);
        CHECK((*back.value)[0].solver_calls == 9);
        CHECK((*back.value)[0].iterations == 2);
        CHECK((*back.value)[0].bound == 8);
        CHECK((*back.value)[1].kappa == 3);
        CHECK((*back.value)[1].verdict == ReportVerdict::NoSolutionWithinBound);
        CHECK(emit_results(*back.value, 60).runs == t.runs);
        CHECK_FALSE(parse_run_records("nope\n1,2\n").ok());
    }
}

TEST_SUITE("command line")
{
    TEST_CASE("gen reproduces the library bundle")
    {
        TempDir dir;
        auto out = dir.path / "f.json";
        CHECK(cli("gen --family factory1 --works 2 --deadline 50 --kappa 2 --out " + out.string(), dir.path / "log") ==
              0);
        CHECK(slurp(out) == serialize_problem_bundle(gen_factory(1, 2, 50, 2)));
        CHECK(cli("gen --family rover --locations 3 --comm 1 --out " + (dir.path / "r.json").string(),
                  dir.path / "log") == 0);
        CHECK(cli("gen --family rover --locations 3 --comm 7 --out -", dir.path / "log") == 2);
    }

    TEST_CASE("validate verdicts and exit codes")
    {
        TempDir dir;
        auto bundle = dir.path / "f.json";
        spit(bundle, serialize_problem_bundle(gen_factory(1, 2, 50, 2)));
        auto plan = [&](const std::string& name, const std::string& entries) {
            auto p = dir.path / name;
            spit(p, "{\"plan\": [" + entries + "]}");
            return p.string();
        };
        auto e = [](const char* a, const char* s, const char* d) {
            return std::string("{\"action\": \"") + a + "\", \"start\": \"" + s + "\", \"duration\": \"" + d + "\"}";
        };
        auto pi2 = plan("pi2.json", e("Process", "0", "45") + "," + e("Work", "1", "20") + "," + e("Work", "22", "20"));
        auto pi3 = plan("pi3.json", e("Process", "0", "45") + "," + e("Work", "1", "20") + "," +
                                        e("Cooldown", "22", "2") + "," + e("Work", "49/2", "20"));
        auto log = dir.path / "log";
        CHECK(cli("validate " + bundle.string() + " " + pi2 + " --smt", log) == 1);
        CHECK(slurp(log).find("NON-EXECUTABLE") != std::string::npos);
        auto report = dir.path / "rep.json";
        CHECK(cli("validate " + bundle.string() + " " + pi3 + " --report " + report.string(), log) == 0);
        CHECK(slurp(report).find("\"verdict\": \"SOLUTION\"") != std::string::npos);
        CHECK(cli("report --render " + report.string(), log) == 0);

        CHECK(cli("validate " + bundle.string() + " " + (dir.path / "missing.json").string(), log) == 2);
        spit(dir.path / "broken.json", "{");
        CHECK(cli("validate " + bundle.string() + " " + (dir.path / "broken.json").string(), log) == 2);
        CHECK(cli("solve " + bundle.string() + " --mode fast", log) == 2);
        CHECK(cli("frobnicate", log) == 2);
    }

    TEST_CASE("solve: solution, exhaustion and timeout")
    {
        TempDir dir;
        auto log = dir.path / "log";
        auto bundle = dir.path / "f1.json";
        spit(bundle, serialize_problem_bundle(gen_factory(1, 1, 25, 2)));
        auto out = dir.path / "plan.json";
        CHECK(cli("solve " + bundle.string() + " --mode ref --out " + out.string(), log) == 0);
        auto parsed = parse_plan(slurp(out), gen_factory(1, 1, 25, 2).model.problem);
        REQUIRE(parsed.ok());
        CHECK(validate_plan(gen_factory(1, 1, 25, 2).model, *parsed.value).ok());

        // A single Work does not fit a 10-unit process.
        auto tight = dir.path / "tight.json";
        spit(tight, serialize_problem_bundle(gen_factory(1, 1, 10, 2)));
        CHECK(cli("solve " + tight.string() + " --mode ref --max-path-len 6", log) == 1);

        auto big = dir.path / "f3.json";
        spit(big, serialize_problem_bundle(gen_factory(1, 3, 75, 3)));
        CHECK(cli("solve " + big.string() + " --mode enc --timeout 1", log) == 3);
    }

    TEST_CASE("report aggregates runs files")
    {
        TempDir dir;
        std::vector<RunRecord> rs{rec("f1", Family::Factory1, "enc", ReportVerdict::Solution, 3.0),
                                  rec("f1", Family::Factory1, "ref", ReportVerdict::Solution, 1.0)};
        spit(dir.path / "runs.csv", emit_results(rs, 10).runs);
        auto tables = dir.path / "tables";
        CHECK(cli("report " + (dir.path / "runs.csv").string() + " --out-dir " + tables.string(), dir.path / "log") ==
              0);
        for (const char* f : {"runs.csv", "coverage.csv", "cactus.csv", "scatter.csv"})
            CHECK(fs::exists(tables / f));
        CHECK(slurp(tables / "coverage.csv") == emit_results(rs, 10).coverage);
    }
}
