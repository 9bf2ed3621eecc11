// Command-line front end. Exit codes: 0 solution / plan OK, 1 no solution or
// violation found, 2 usage or input error, 3 timeout or unknown.

#include "pamp/bench.hpp"
#include "pamp/encoding.hpp"
#include "pamp/engine.hpp"
#include "pamp/formats.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace
{

using namespace pamp;

constexpr int exit_ok = 0;
constexpr int exit_violation = 1;
constexpr int exit_input = 2;
constexpr int exit_unknown = 3;

struct InputError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write " + path);
    out << text;
}

// "-" writes to stdout.
void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-")
        std::cout << text;
    else
        write_file(path, text);
}

template <class T>
T unwrap(ParseResult<T> r, const std::string& what)
{
    for (const auto& d : r.diagnostics)
        std::cerr << what << ": " << format_diagnostic(d) << "\n";
    if (!r.ok())
        throw InputError("invalid " + what);
    return std::move(*r.value);
}

ProblemBundle load_bundle(const std::string& path) { return unwrap(parse_problem_bundle(read_file(path)), path); }

void print_plan(const TemporalPlanningProblem& problem, const TimeTriggeredPlan& plan)
{
    for (const auto& e : plan.entries)
        std::cout << "  " << to_display_string(e.start) << ": " << problem.actions[e.action].name << " ["
                  << to_display_string(e.duration) << "]\n";
}

struct SolverOptions
{
    std::string command = "z3 -in";
    std::string strategy = "auto";

    void add(CLI::App& app)
    {
        app.add_option("--solver-cmd", command, "SMT solver command reading SMT-LIB on stdin")->capture_default_str();
        app.add_option("--strategy", strategy, "Quantifier strategy")
            ->check(CLI::IsMember({"native", "cegis", "auto"}))
            ->capture_default_str();
    }

    [[nodiscard]] smt::SolverConfig config() const
    {
        smt::SolverConfig cfg;
        cfg.command = command;
        cfg.strategy = *smt::parse_strategy(strategy);
        return cfg;
    }
};

struct EngineOptions
{
    SolverOptions solver;
    std::string mode = "ref";
    int kappa = 0;
    std::size_t max_h = 16;
    std::size_t max_path_len = 16;
    std::string search = "id";
    std::size_t node_budget = 5'000'000;
    double timeout = 0;

    void add(CLI::App& app, bool with_mode)
    {
        if (with_mode)
            app.add_option("--mode", mode, "Algorithm")->check(CLI::IsMember({"enc", "ref"}))->capture_default_str();
        app.add_option("--kappa", kappa, "Trace steps per plan event (default: the bundle's)")
            ->check(CLI::PositiveNumber);
        app.add_option("--max-h", max_h, "Largest plan bound for enc")->capture_default_str();
        app.add_option("--max-path-len", max_path_len, "Longest candidate for ref")->capture_default_str();
        app.add_option("--search", search, "Planner strategy for ref")
            ->check(CLI::IsMember({"id", "greedy"}))
            ->capture_default_str();
        app.add_option("--node-budget", node_budget, "Planner node budget")->capture_default_str();
        app.add_option("--timeout", timeout, "Wall-clock budget in seconds per run (0: none)")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
        solver.add(app);
    }

    [[nodiscard]] EngineConfig config() const
    {
        EngineConfig cfg;
        cfg.mode = *parse_mode(mode);
        if (kappa > 0)
            cfg.kappa = kappa;
        cfg.max_h = max_h;
        cfg.max_path_len = max_path_len;
        cfg.solver = solver.config();
        cfg.search = *parse_search_strategy(search);
        cfg.node_budget = node_budget;
        cfg.time_budget_seconds = timeout;
        return cfg;
    }
};

// ---------------------------------------------------------------------------

struct SolveCmd
{
    std::string bundle;
    EngineOptions engine;
    std::string out;
    std::string report;
    std::string dump_dir;
    std::size_t dump_h = 0;

    int run() const
    {
        ProblemBundle b = load_bundle(bundle);
        EngineConfig cfg = engine.config();
        if (!dump_dir.empty()) {
            std::filesystem::create_directories(dump_dir);
            PampProblem p = b.model;
            if (cfg.kappa)
                p.kappa = *cfg.kappa;
            enc::dump_phi(p, dump_h > 0 ? dump_h : 2 * p.problem.actions.size(), dump_dir);
            std::cerr << "wrote SMT-LIB dumps to " << dump_dir << "\n";
        }
        SolveResult r = solve(b.model, cfg);
        Report rep;
        rep.stats = r.stats;
        rep.message = r.reason;
        rep.plan = r.plan;
        switch (r.verdict) {
        case SolveResult::Verdict::Solution:
            rep.verdict = ReportVerdict::Solution;
            break;
        case SolveResult::Verdict::NoSolutionWithinBounds:
            rep.verdict = ReportVerdict::NoSolutionWithinBound;
            break;
        case SolveResult::Verdict::Unknown:
            rep.verdict = ReportVerdict::Unknown;
            break;
        }
        std::cout << to_string(r.verdict);
        if (!r.reason.empty())
            std::cout << " (" << r.reason << ")";
        std::cout << "\nmode " << r.stats.mode << ", bound " << r.stats.horizon << ", iterations " << r.stats.iterations
                  << ", learned prefixes " << r.stats.learned_prefixes << ", solver calls " << r.stats.solver_calls
                  << ", " << r.stats.wall_seconds << " s\n";
        for (const auto& prefix : r.learned) {
            std::cout << "  learned:";
            for (const auto& ev : prefix)
                std::cout << " " << event_name(b.model.problem, ev);
            std::cout << "\n";
        }
        if (r.plan) {
            print_plan(b.model.problem, *r.plan);
            if (!out.empty())
                emit(out, serialize_plan(b.model.problem, *r.plan, &r.stats));
        }
        if (!report.empty())
            emit(report, serialize_report(b.model, rep));
        switch (r.verdict) {
        case SolveResult::Verdict::Solution:
            return exit_ok;
        case SolveResult::Verdict::NoSolutionWithinBounds:
            return exit_violation;
        case SolveResult::Verdict::Unknown:
            break;
        }
        return exit_unknown;
    }
};

struct ValidateCmd
{
    std::string bundle;
    std::string plan;
    int kappa = 0;
    bool smt = false;
    SolverOptions solver;
    std::string report;

    int run() const
    {
        ProblemBundle b = load_bundle(bundle);
        if (kappa > 0)
            b.model.kappa = kappa;
        TimeTriggeredPlan pi = unwrap(parse_plan(read_file(plan), b.model.problem), plan);
        Verdict v = validate_plan(b.model, pi);

        Report rep;
        rep.plan = pi;
        rep.message = v.message;
        rep.witness = v.witness;
        rep.stats.mode = "validate";
        switch (v.kind) {
        case Verdict::Kind::Solution:
            rep.verdict = ReportVerdict::Solution;
            break;
        case Verdict::Kind::InvalidPlan:
            rep.verdict = ReportVerdict::InvalidPlan;
            break;
        case Verdict::Kind::NonExecutable:
            rep.verdict = ReportVerdict::NonExecutable;
            break;
        case Verdict::Kind::Unsafe:
            rep.verdict = ReportVerdict::Unsafe;
            break;
        }
        std::cout << to_string(v.kind) << "\n";
        if (!v.message.empty())
            std::cout << v.message << "\n";
        if (v.witness)
            std::cout << describe_witness(b.model.problem, b.model.platform, *v.witness);

        int code = v.ok() ? exit_ok : exit_violation;
        if (smt && v.kind != Verdict::Kind::InvalidPlan) {
            auto rho = plan_to_snap_sequence(b.model.problem, pi);
            enc::SmtVerdict s = enc::check_plan_smt(b.model, rho, solver.config());
            std::string_view kind = s.kind == enc::SmtVerdict::Kind::Ok              ? "SOLUTION"
                                    : s.kind == enc::SmtVerdict::Kind::NonExecutable ? "NON-EXECUTABLE"
                                    : s.kind == enc::SmtVerdict::Kind::Unsafe        ? "UNSAFE"
                                                                                     : "UNKNOWN";
            std::cout << "smt cross-check: " << kind << " (" << s.solver_calls << " solver calls)\n";
            if (s.kind == enc::SmtVerdict::Kind::Unknown) {
                std::cerr << "smt cross-check inconclusive: " << s.reason << "\n";
                code = exit_unknown;
            } else if (kind != to_string(v.kind)) {
                std::cerr << "smt cross-check disagrees with the validator\n";
                code = exit_unknown;
            }
        }
        if (!report.empty())
            emit(report, serialize_report(b.model, rep));
        return code;
    }
};

std::vector<int> parse_int_list(const std::string& s)
{
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(std::stoi(item));
    return out;
}

struct GenCmd
{
    std::string family = "factory1";
    int works = 2;
    int deadline = 0;
    int locations = 3;
    std::string comm;
    int kappa = 2;
    std::string out = "-";

    int run() const
    {
        BenchSpec spec;
        spec.family = *parse_family(family);
        spec.works = works;
        spec.deadline = deadline > 0 ? deadline : default_deadline(works);
        spec.locations = locations;
        spec.comm = parse_int_list(comm);
        spec.kappa = kappa;
        ProblemBundle b;
        try {
            b = generate(spec);
        } catch (const std::invalid_argument& e) {
            throw InputError(e.what());
        }
        emit(out, serialize_problem_bundle(b));
        return exit_ok;
    }
};

struct ReportCmd
{
    std::vector<std::string> runs;
    std::string render;
    std::string out_dir = ".";
    double timeout = 120;

    int run() const
    {
        if (!render.empty()) {
            std::cout << unwrap(render_report(read_file(render)), render);
            return exit_ok;
        }
        if (runs.empty())
            throw InputError("report needs runs CSV files or --render");
        std::vector<RunRecord> all;
        for (const auto& path : runs) {
            auto rs = unwrap(parse_run_records(read_file(path)), path);
            all.insert(all.end(), rs.begin(), rs.end());
        }
        write_tables(all, out_dir, timeout);
        return exit_ok;
    }

    static void write_tables(const std::vector<RunRecord>& records, const std::string& dir, double timeout)
    {
        std::filesystem::create_directories(dir);
        ResultTables t = emit_results(records, timeout);
        const std::filesystem::path d(dir);
        write_file((d / "runs.csv").string(), t.runs);
        write_file((d / "coverage.csv").string(), t.coverage);
        write_file((d / "cactus.csv").string(), t.cactus);
        write_file((d / "scatter.csv").string(), t.scatter);
        std::cout << t.coverage;
    }
};

struct BenchCmd
{
    EngineOptions engine;
    std::vector<std::string> modes{"enc", "ref"};
    std::string filter;
    std::string out_dir = "bench-results";
    unsigned jobs = 1;

    int run()
    {
        if (engine.timeout <= 0)
            engine.timeout = 120;
        std::vector<std::pair<BenchSpec, Mode>> work;
        for (const auto& spec : desk_suite()) {
            if (!filter.empty() && spec.id().find(filter) == std::string::npos)
                continue;
            for (const auto& m : modes)
                work.emplace_back(spec, *parse_mode(m));
        }
        if (work.empty())
            throw InputError("no instance matches the filter");

        // Workers take instances in order; records are merged by index so
        // the output does not depend on scheduling.
        std::vector<RunRecord> records(work.size());
        std::size_t next = 0;
        std::mutex mu;
        auto worker = [&] {
            while (true) {
                std::size_t i;
                {
                    std::lock_guard lock(mu);
                    if (next == work.size())
                        return;
                    i = next++;
                }
                EngineConfig cfg = engine.config();
                cfg.mode = work[i].second;
                cfg.kappa.reset();
                RunRecord r = run_instance(work[i].first, cfg);
                std::lock_guard lock(mu);
                records[i] = r;
                std::cerr << r.instance << " " << r.mode << ": " << to_string(r.verdict) << " " << r.wall_seconds
                          << " s\n";
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < std::max(1u, jobs); ++t)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
        ReportCmd::write_tables(records, out_dir, engine.timeout);
        return exit_ok;
    }
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Temporal planning with timed-automaton platform constraints"};
    app.require_subcommand(1);

    SolveCmd solve_cmd;
    auto* s = app.add_subcommand("solve", "Search for a plan that is valid, executable and safe");
    s->add_option("bundle", solve_cmd.bundle, "Problem bundle (JSON)")->required()->check(CLI::ExistingFile);
    solve_cmd.engine.add(*s, true);
    s->add_option("--out", solve_cmd.out, "Write the plan here ('-' for stdout)");
    s->add_option("--report", solve_cmd.report, "Write a JSON report here");
    s->add_option("--dump-smt", solve_cmd.dump_dir, "Write the bounded encoding's SMT-LIB scripts to this directory");
    s->add_option("--dump-h", solve_cmd.dump_h, "Plan bound for --dump-smt (default: two events per action)");

    ValidateCmd validate_cmd;
    auto* v = app.add_subcommand("validate", "Check a plan against the bundle with the zone-based oracle");
    v->add_option("bundle", validate_cmd.bundle, "Problem bundle (JSON)")->required()->check(CLI::ExistingFile);
    v->add_option("plan", validate_cmd.plan, "Plan (JSON)")->required()->check(CLI::ExistingFile);
    v->add_option("--kappa", validate_cmd.kappa, "Override the bundle's kappa")->check(CLI::PositiveNumber);
    v->add_flag("--smt", validate_cmd.smt, "Also decide the plan with the SMT encoding and compare");
    validate_cmd.solver.add(*v);
    v->add_option("--report", validate_cmd.report, "Write a JSON report here");

    GenCmd gen_cmd;
    auto* g = app.add_subcommand("gen", "Generate a benchmark bundle");
    g->add_option("--family", gen_cmd.family, "Instance family")
        ->check(CLI::IsMember({"factory1", "factory2", "rover"}))
        ->capture_default_str();
    g->add_option("--works", gen_cmd.works, "Factory: Work repetitions")->capture_default_str();
    g->add_option("--deadline", gen_cmd.deadline, "Factory: deadline (default 25 per Work)");
    g->add_option("--locations", gen_cmd.locations, "Rover: number of locations")->capture_default_str();
    g->add_option("--comm", gen_cmd.comm, "Rover: comma-separated communication locations, e.g. 1,3");
    g->add_option("--kappa", gen_cmd.kappa, "Trace steps per plan event")->capture_default_str();
    g->add_option("--out", gen_cmd.out, "Output path ('-' for stdout)")->capture_default_str();

    ReportCmd report_cmd;
    auto* r = app.add_subcommand("report", "Aggregate runs CSVs into coverage, cactus and scatter tables");
    r->add_option("runs", report_cmd.runs, "Runs CSV files");
    r->add_option("--render", report_cmd.render, "Render a JSON report as text instead");
    r->add_option("--out-dir", report_cmd.out_dir, "Directory for the tables")->capture_default_str();
    r->add_option("--timeout", report_cmd.timeout, "Time limit substituted for unsolved runs in scatter")
        ->capture_default_str();

    BenchCmd bench_cmd;
    auto* b = app.add_subcommand("bench", "Run the desk-scale suite in both modes");
    bench_cmd.engine.add(*b, false);
    b->add_option("--modes", bench_cmd.modes, "Modes to run")->delimiter(',')->capture_default_str();
    b->add_option("--filter", bench_cmd.filter, "Only instances whose id contains this");
    b->add_option("--out-dir", bench_cmd.out_dir, "Directory for runs and tables")->capture_default_str();
    b->add_option("--jobs", bench_cmd.jobs, "Worker threads")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }

    try {
        if (s->parsed())
            return solve_cmd.run();
        if (v->parsed())
            return validate_cmd.run();
        if (g->parsed())
            return gen_cmd.run();
        if (r->parsed())
            return report_cmd.run();
        if (b->parsed())
            return bench_cmd.run();
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const FormatError& e) {
        for (const auto& d : e.diagnostics())
            std::cerr << format_diagnostic(d) << "\n";
        return exit_input;
    } catch (const ModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const PlanError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_unknown;
    }
    return exit_input;
}
