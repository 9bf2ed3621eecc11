#include "pamp/bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pamp
{

using json = nlohmann::ordered_json;

void Component::add_location(std::string name, std::string invariant)
{
    locations.push_back(std::move(name));
    invariants.push_back(std::move(invariant));
}

namespace
{

bool is_snap_label(const std::string& l) { return l.rfind("start(", 0) == 0 || l.rfind("end(", 0) == 0; }

std::string conj(const std::string& a, const std::string& b)
{
    if (a.empty() || a == "true")
        return b.empty() ? "true" : b;
    if (b.empty() || b == "true")
        return a;
    return a + " && " + b;
}

std::set<std::string> snap_alphabet(const Component& c)
{
    std::set<std::string> out;
    for (const auto& e : c.edges)
        if (is_snap_label(e.label))
            out.insert(e.label);
    return out;
}

std::string pair_name(const std::string& a, const std::string& b) { return a + "." + b; }

} // namespace

Component compose(const Component& a, const Component& b)
{
    Component out;
    for (std::size_t i = 0; i < a.locations.size(); ++i)
        for (std::size_t j = 0; j < b.locations.size(); ++j)
            out.add_location(pair_name(a.locations[i], b.locations[j]), conj(a.invariants[i], b.invariants[j]));
    out.initial = pair_name(a.initial, b.initial);
    auto sa = snap_alphabet(a);
    auto sb = snap_alphabet(b);
    for (const auto& ea : a.edges) {
        bool shared = is_snap_label(ea.label) && sb.count(ea.label);
        if (shared) {
            for (const auto& eb : b.edges) {
                if (eb.label != ea.label)
                    continue;
                ComponentEdge e{pair_name(ea.from, eb.from), pair_name(ea.to, eb.to), ea.label,
                                conj(ea.guard, eb.guard), ea.reset};
                for (const auto& r : eb.reset)
                    if (std::find(e.reset.begin(), e.reset.end(), r) == e.reset.end())
                        e.reset.push_back(r);
                out.edges.push_back(std::move(e));
            }
            continue;
        }
        for (const auto& lb : b.locations)
            out.edges.push_back({pair_name(ea.from, lb), pair_name(ea.to, lb), ea.label, ea.guard, ea.reset});
    }
    for (const auto& eb : b.edges) {
        if (is_snap_label(eb.label) && sa.count(eb.label))
            continue;
        for (const auto& la : a.locations)
            out.edges.push_back({pair_name(la, eb.from), pair_name(la, eb.to), eb.label, eb.guard, eb.reset});
    }
    return out;
}

std::string_view to_string(Family f)
{
    switch (f) {
    case Family::Factory1:
        return "factory1";
    case Family::Factory2:
        return "factory2";
    case Family::Rover:
        return "rover";
    }
    return "?";
}

std::optional<Family> parse_family(std::string_view s)
{
    for (auto f : {Family::Factory1, Family::Factory2, Family::Rover})
        if (to_string(f) == s)
            return f;
    return std::nullopt;
}

std::string BenchSpec::id() const
{
    std::ostringstream os;
    os << to_string(family);
    if (family == Family::Rover) {
        os << "-n" << locations << "-c";
        for (std::size_t i = 0; i < comm.size(); ++i)
            os << (i ? "_" : "") << comm[i];
    } else {
        os << "-w" << works << "-d" << deadline;
    }
    os << "-k" << kappa;
    return os.str();
}

namespace
{

json platform_json(const Component& c, const std::vector<std::string>& clocks)
{
    json p;
    p["clocks"] = clocks;
    p["global_clock"] = clocks.front();
    json locs = json::array();
    for (std::size_t i = 0; i < c.locations.size(); ++i)
        locs.push_back(json{{"name", c.locations[i]}, {"invariant", c.invariants[i]}});
    p["locations"] = locs;
    p["initial"] = c.initial;
    json trs = json::array();
    for (const auto& e : c.edges)
        trs.push_back(json{{"from", e.from}, {"to", e.to}, {"label", e.label}, {"guard", e.guard}, {"reset", e.reset}});
    p["transitions"] = trs;
    return p;
}

json action_json(const std::string& name, const std::string& lo, const std::string& hi, json start, json end,
                 std::vector<std::string> overall)
{
    return json{{"name", name},
                {"duration", {{"min", lo}, {"max", hi}}},
                {"start", std::move(start)},
                {"end", std::move(end)},
                {"overall", std::move(overall)}};
}

json snap(std::vector<std::string> pre, std::vector<std::string> add, std::vector<std::string> del)
{
    return json{{"pre", std::move(pre)}, {"add", std::move(add)}, {"del", std::move(del)}};
}

// Work/cooldown task structure shared by both Factory variants. `idle` is
// where Work may first start and where a finished cooldown returns.
void add_work_cycle(Component& c, const std::string& idle)
{
    c.add_location("W_STARTING", "c_W <= 2");
    c.add_location("W_STARTED", "c_W <= 20");
    c.add_location("W_RESUMING", "c_W <= 2");
    c.add_location("W_ENDED");
    c.add_location("C_STARTED", "c_C <= 2");
    c.edges.push_back({idle, "W_STARTING", "start(Work)", "true", {"c_W"}});
    c.edges.push_back({"W_STARTING", "W_STARTED", "tau", "true", {}});
    c.edges.push_back({"W_STARTED", "W_ENDED", "end(Work)", "c_W == 20", {"c"}});
    c.edges.push_back({"W_ENDED", "W_RESUMING", "start(Work)", "c >= 10", {"c_W"}});
    c.edges.push_back({"W_RESUMING", "W_STARTED", "tau", "true", {}});
    c.edges.push_back({"W_ENDED", "C_STARTED", "start(Cooldown)", "true", {"c_C"}});
    c.edges.push_back({"C_STARTED", idle, "end(Cooldown)", "c_C == 2", {}});
}

json factory_problem(int works, bool with_process)
{
    json problem;
    problem["propositions"] = with_process ? json::array({"processing"}) : json::array();
    problem["counters"] = json::array({json{{"name", "steps"}, {"max", works}}});
    problem["init"] = json::array();
    problem["goal"] = json::array({"steps=" + std::to_string(works)});
    json actions = json::array();
    if (with_process)
        actions.push_back(action_json("Process", "1", "inf", snap({}, {"processing"}, {}), snap({}, {}, {"processing"}), {}));
    json work = action_json("Work", "20", "20", snap({}, {}, {}), snap({}, {}, {}),
                            with_process ? std::vector<std::string>{"processing"} : std::vector<std::string>{});
    work["end"]["increment"] = "steps";
    actions.push_back(work);
    actions.push_back(action_json("Cooldown", "2", "2", snap({}, {}, {}), snap({}, {}, {}), {}));
    problem["actions"] = actions;
    return problem;
}

} // namespace

ProblemBundle gen_factory(int variant, int works, int deadline, int kappa)
{
    if (variant != 1 && variant != 2)
        throw std::invalid_argument("factory variant must be 1 or 2");
    if (works < 1 || deadline <= 0 || kappa < 1)
        throw std::invalid_argument("factory parameters out of range");
    json doc;
    doc["name"] = "factory" + std::to_string(variant) + "-w" + std::to_string(works) + "-d" + std::to_string(deadline);
    doc["kappa"] = kappa;
    std::string dl = std::to_string(deadline);
    if (variant == 1) {
        doc["description"] = "Process with " + std::to_string(works) + " Work steps; deadline " + dl +
                             " on the process clock";
        doc["problem"] = factory_problem(works, true);
        Component ta;
        ta.add_location("OFF");
        ta.add_location("P_STARTED");
        ta.initial = "OFF";
        ta.edges.push_back({"OFF", "P_STARTED", "start(Process)", "true", {"c_P"}});
        add_work_cycle(ta, "P_STARTED");
        ta.add_location("P_ENDED");
        ta.add_location("BAD");
        ta.edges.push_back({"W_ENDED", "BAD", "tau", "c_P > " + dl, {}});
        ta.edges.push_back({"W_ENDED", "P_ENDED", "end(Process)", "true", {}});
        ta.edges.push_back({"BAD", "P_ENDED", "end(Process)", "true", {}});
        // Canonical location order: OFF, P_STARTED, W_STARTING, W_STARTED,
        // W_RESUMING, W_ENDED, P_ENDED, BAD, C_STARTED.
        std::vector<std::string> order{"OFF",     "P_STARTED", "W_STARTING", "W_STARTED", "W_RESUMING",
                                       "W_ENDED", "P_ENDED",   "BAD",        "C_STARTED"};
        Component sorted = ta;
        sorted.locations.clear();
        sorted.invariants.clear();
        for (const auto& name : order) {
            auto it = std::find(ta.locations.begin(), ta.locations.end(), name);
            sorted.add_location(name, ta.invariants[static_cast<std::size_t>(it - ta.locations.begin())]);
        }
        doc["platform"] = platform_json(sorted, {"gamma", "c_P", "c_W", "c", "c_C"});
        doc["bad"] = json::array({json{{"location", "BAD"}, {"guard", "true"}}});
    } else {
        doc["description"] = std::to_string(works) + " Work steps; Work synchronization is disabled after time " + dl;
        doc["problem"] = factory_problem(works, false);
        Component task;
        task.add_location("IDLE");
        task.initial = "IDLE";
        add_work_cycle(task, "IDLE");
        Component timer;
        timer.add_location("OPEN");
        timer.add_location("EXPIRED");
        timer.initial = "OPEN";
        timer.edges.push_back({"OPEN", "OPEN", "start(Work)", "gamma <= " + dl, {}});
        timer.edges.push_back({"OPEN", "OPEN", "end(Work)", "gamma <= " + dl, {}});
        timer.edges.push_back({"OPEN", "EXPIRED", "expire", "gamma > " + dl, {}});
        doc["platform"] = platform_json(compose(task, timer), {"gamma", "c_W", "c", "c_C"});
        doc["bad"] = json::array();
    }
    return load_problem_bundle(doc.dump());
}

ProblemBundle gen_rover(int locations, const std::vector<int>& comm, int kappa)
{
    if (locations < 2 || kappa < 1)
        throw std::invalid_argument("rover needs at least two locations");
    std::set<int> comm_set;
    for (int c : comm) {
        if (c < 0 || c >= locations)
            throw std::invalid_argument("communication location l" + std::to_string(c) + " is out of range");
        comm_set.insert(c);
    }
    auto at = [](int i) { return "at_l" + std::to_string(i); };
    auto sent = [](int i) { return "sent_l" + std::to_string(i); };

    json doc;
    BenchSpec spec{Family::Rover, 0, 0, locations, {comm_set.begin(), comm_set.end()}, kappa};
    doc["name"] = spec.id();
    doc["description"] = "rover over " + std::to_string(locations) + " locations sending at " +
                         std::to_string(comm_set.size()) + " of them";
    doc["kappa"] = kappa;
    json problem;
    std::vector<std::string> props;
    for (int i = 0; i < locations; ++i)
        props.push_back(at(i));
    for (int c : comm_set)
        props.push_back(sent(c));
    problem["propositions"] = props;
    problem["init"] = json::array({at(0)});
    json goal = json::array();
    for (int c : comm_set)
        goal.push_back(sent(c));
    goal.push_back(at(locations - 1));
    problem["goal"] = goal;

    Component task;
    task.add_location("IDLE");
    task.add_location("BUSY");
    task.initial = "IDLE";
    Component radio;
    radio.add_location("OFF");
    radio.add_location("ACTIVE", "m <= 30");
    radio.add_location("STANDBY");
    radio.add_location("RESUMING", "m <= 0");
    radio.initial = "OFF";
    radio.edges.push_back({"ACTIVE", "STANDBY", "standby", "m >= 30", {}});
    radio.edges.push_back({"RESUMING", "ACTIVE", "resumed", "true", {}});

    json actions = json::array();
    for (int i = 0; i < locations; ++i)
        for (int j = 0; j < locations; ++j) {
            if (i == j)
                continue;
            std::string name = "move_l" + std::to_string(i) + "_l" + std::to_string(j);
            std::string d = std::abs(i - j) == 1 ? "1" : "100";
            actions.push_back(action_json(name, d, d, snap({at(i)}, {}, {at(i)}), snap({}, {at(j)}, {}), {}));
            task.edges.push_back({"IDLE", "IDLE", "start(" + name + ")", "true", {}});
            task.edges.push_back({"IDLE", "IDLE", "end(" + name + ")", "true", {}});
        }
    for (int c : comm_set) {
        std::string name = "comm_l" + std::to_string(c);
        actions.push_back(action_json(name, "1", "1", snap({at(c)}, {}, {}), snap({}, {sent(c)}, {}), {at(c)}));
        std::string s = "start(" + name + ")";
        task.edges.push_back({"IDLE", "BUSY", s, "true", {}});
        task.edges.push_back({"BUSY", "IDLE", "end(" + name + ")", "true", {}});
        radio.edges.push_back({"OFF", "ACTIVE", s, "true", {"m"}});
        radio.edges.push_back({"ACTIVE", "ACTIVE", s, "true", {"m"}});
        radio.edges.push_back({"STANDBY", "RESUMING", s, "true", {"m"}});
    }
    problem["actions"] = actions;
    doc["problem"] = problem;
    Component product = compose(task, radio);
    doc["platform"] = platform_json(product, {"gamma", "m"});
    json bad = json::array();
    for (const auto& l : task.locations)
        bad.push_back(json{{"location", l + ".RESUMING"}, {"guard", "true"}});
    doc["bad"] = bad;
    return load_problem_bundle(doc.dump());
}

ProblemBundle generate(const BenchSpec& spec)
{
    switch (spec.family) {
    case Family::Factory1:
        return gen_factory(1, spec.works, spec.deadline, spec.kappa);
    case Family::Factory2:
        return gen_factory(2, spec.works, spec.deadline, spec.kappa);
    case Family::Rover:
        return gen_rover(spec.locations, spec.comm, spec.kappa);
    }
    throw std::invalid_argument("unknown family");
}

std::vector<BenchSpec> desk_suite()
{
    std::vector<BenchSpec> out;
    for (int kappa : {2, 3}) {
        for (Family f : {Family::Factory1, Family::Factory2})
            for (int w : {1, 2, 3})
                out.push_back(BenchSpec{f, w, default_deadline(w), 0, {}, kappa});
        const std::vector<std::pair<int, std::vector<int>>> rovers{{3, {1}}, {4, {1}}, {4, {1, 2}}, {5, {2}}, {5, {1, 3}}};
        for (const auto& [n, comm] : rovers)
            out.push_back(BenchSpec{Family::Rover, 0, 0, n, comm, kappa});
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace
{

std::string fmt_seconds(double s)
{
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << s;
    return os.str();
}

} // namespace

ResultTables emit_results(const std::vector<RunRecord>& records, double timeout_seconds)
{
    if (records.empty())
        throw std::invalid_argument("no run records to emit");
    ResultTables out;

    std::ostringstream runs;
    runs << "instance,family,kappa,mode,verdict,wall_seconds,solver_calls,iterations,bound\n";
    for (const auto& r : records)
        runs << r.instance << "," << to_string(r.family) << "," << r.kappa << "," << r.mode << ","
             << to_string(r.verdict) << "," << fmt_seconds(r.wall_seconds) << "," << r.solver_calls << ","
             << r.iterations << "," << r.bound << "\n";
    out.runs = runs.str();

    std::map<std::tuple<std::string, int, std::string>, std::pair<int, int>> cov;
    for (const auto& r : records) {
        auto& c = cov[{std::string(to_string(r.family)), r.kappa, r.mode}];
        ++c.first;
        c.second += r.solved() ? 1 : 0;
    }
    std::ostringstream coverage;
    coverage << "family,kappa,mode,instances,solved\n";
    for (const auto& [key, c] : cov)
        coverage << std::get<0>(key) << "," << std::get<1>(key) << "," << std::get<2>(key) << "," << c.first << ","
                 << c.second << "\n";
    out.coverage = coverage.str();

    std::map<std::string, std::vector<double>> by_mode;
    for (const auto& r : records)
        if (r.solved())
            by_mode[r.mode].push_back(r.wall_seconds);
    std::ostringstream cactus;
    cactus << "mode,rank,wall_seconds\n";
    for (auto& [mode, times] : by_mode) {
        std::sort(times.begin(), times.end());
        for (std::size_t i = 0; i < times.size(); ++i)
            cactus << mode << "," << i + 1 << "," << fmt_seconds(times[i]) << "\n";
    }
    out.cactus = cactus.str();

    std::map<std::string, std::pair<std::optional<double>, std::optional<double>>> pairs;
    for (const auto& r : records) {
        double t = r.solved() ? r.wall_seconds : timeout_seconds;
        if (r.mode == "enc")
            pairs[r.instance].first = t;
        else if (r.mode == "ref")
            pairs[r.instance].second = t;
    }
    std::ostringstream scatter;
    scatter << "instance,enc_seconds,ref_seconds\n";
    for (const auto& [inst, p] : pairs)
        if (p.first && p.second)
            scatter << inst << "," << fmt_seconds(*p.first) << "," << fmt_seconds(*p.second) << "\n";
    out.scatter = scatter.str();
    return out;
}

ParseResult<std::vector<RunRecord>> parse_run_records(std::string_view csv)
{
    ParseResult<std::vector<RunRecord>> out;
    std::istringstream is{std::string(csv)};
    std::string line;
    std::size_t row = 0;
    std::vector<RunRecord> records;
    auto fail = [&](const std::string& msg) {
        out.diagnostics.push_back({"line " + std::to_string(row), msg, SourceDiagnostic::Severity::Error});
    };
    while (std::getline(is, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (row == 1) {
            if (line.rfind("instance,", 0) != 0)
                fail("missing header 'instance,family,...'");
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');)
            cells.push_back(cell);
        if (cells.size() != 9) {
            fail("expected 9 columns, found " + std::to_string(cells.size()));
            continue;
        }
        RunRecord r;
        r.instance = cells[0];
        auto fam = parse_family(cells[1]);
        auto verdict = parse_report_verdict(cells[4]);
        if (!fam || !verdict) {
            fail("unknown family or verdict");
            continue;
        }
        r.family = *fam;
        r.mode = cells[3];
        r.verdict = *verdict;
        try {
            r.kappa = std::stoi(cells[2]);
            r.wall_seconds = std::stod(cells[5]);
            r.solver_calls = std::stoul(cells[6]);
            r.iterations = std::stoul(cells[7]);
            r.bound = std::stoul(cells[8]);
        } catch (const std::exception&) {
            fail("malformed number");
            continue;
        }
        records.push_back(std::move(r));
    }
    if (row == 0)
        fail("empty input");
    if (out.diagnostics.empty())
        out.value = std::move(records);
    return out;
}

RunRecord run_instance(const BenchSpec& spec, const EngineConfig& cfg)
{
    ProblemBundle b = generate(spec);
    SolveResult res = solve(b.model, cfg);
    RunRecord r;
    r.instance = spec.id();
    r.family = spec.family;
    r.kappa = cfg.kappa.value_or(b.model.kappa);
    r.mode = std::string(to_string(cfg.mode));
    switch (res.verdict) {
    case SolveResult::Verdict::Solution:
        r.verdict = ReportVerdict::Solution;
        break;
    case SolveResult::Verdict::NoSolutionWithinBounds:
        r.verdict = ReportVerdict::NoSolutionWithinBound;
        break;
    case SolveResult::Verdict::Unknown:
        r.verdict = ReportVerdict::Unknown;
        break;
    }
    r.wall_seconds = res.stats.wall_seconds;
    r.solver_calls = res.stats.solver_calls;
    r.iterations = res.stats.iterations;
    r.bound = res.stats.horizon;
    return r;
}

} // namespace pamp
