#include "pamp/engine.hpp"

#include "pamp/ta_exec.hpp"

#include <chrono>
#include <stdexcept>

namespace pamp
{

std::string_view to_string(Mode m) { return m == Mode::Enc ? "enc" : "ref"; }

std::optional<Mode> parse_mode(std::string_view s)
{
    if (s == "enc")
        return Mode::Enc;
    if (s == "ref")
        return Mode::Ref;
    return std::nullopt;
}

std::string_view to_string(SolveResult::Verdict v)
{
    switch (v) {
    case SolveResult::Verdict::Solution:
        return "solution";
    case SolveResult::Verdict::NoSolutionWithinBounds:
        return "no-solution-within-bound";
    case SolveResult::Verdict::Unknown:
        return "unknown";
    }
    return "unknown";
}

namespace
{

using Clock = std::chrono::steady_clock;

class Budget
{
public:
    explicit Budget(double seconds) : _start(Clock::now()), _seconds(seconds) {}

    [[nodiscard]] double elapsed() const { return std::chrono::duration<double>(Clock::now() - _start).count(); }
    [[nodiscard]] bool exhausted() const { return _seconds > 0 && elapsed() >= _seconds; }

    /// Solver settings with the per-process timeout capped by what is left.
    [[nodiscard]] smt::SolverConfig cap(smt::SolverConfig cfg) const
    {
        if (_seconds > 0)
            cfg.timeout_seconds = std::max(0.01, std::min(cfg.timeout_seconds, _seconds - elapsed()));
        return cfg;
    }

private:
    Clock::time_point _start;
    double _seconds;
};

PampProblem with_kappa(const PampProblem& p, const EngineConfig& cfg)
{
    PampProblem out = p;
    if (cfg.kappa)
        out.kappa = *cfg.kappa;
    if (out.kappa < 1)
        throw std::invalid_argument("kappa must be at least 1");
    return out;
}

// Defense in depth: nothing leaves the engine as a solution unless the
// independent validator accepts it.
SolveResult finish(const PampProblem& p, SolveResult r, const TimeTriggeredPlan& plan)
{
    Verdict v = validate_plan(p, plan);
    if (!v.ok()) {
        r.verdict = SolveResult::Verdict::Unknown;
        r.reason = "internal: solver plan rejected by the validator (" + std::string(to_string(v.kind)) +
                   "): " + v.message;
        return r;
    }
    r.verdict = SolveResult::Verdict::Solution;
    r.plan = plan;
    return r;
}

} // namespace

TimeTriggeredPlan extract_plan(const TemporalPlanningProblem& problem, const smt::Model& m, const enc::PlanVars& v)
{
    TimeTriggeredPlan out;
    std::vector<Rational> used_times;
    for (std::size_t j = 0; j < v.view.steps; ++j) {
        bool used = false;
        for (ActionId a = 0; a < problem.actions.size(); ++a) {
            used = used || m.get_bool(v.view.end[j][a]->name);
            if (!m.get_bool(v.view.start[j][a]->name))
                continue;
            used = true;
            out.entries.push_back({a, m.get_real(v.view.time[j]->name), m.get_real(v.duration[j][a]->name)});
        }
        if (used)
            used_times.push_back(m.get_real(v.view.time[j]->name));
    }
    for (std::size_t i = 1; i < used_times.size(); ++i)
        if (!(used_times[i - 1] < used_times[i]))
            throw std::logic_error("model schedules two steps at the same time");
    return out;
}

TimeTriggeredPlan extract_plan(const smt::Model& m, const std::vector<SnapEventRef>& events,
                               const std::vector<smt::Term>& times)
{
    std::vector<Rational> values;
    for (std::size_t i = 0; i < events.size(); ++i) {
        values.push_back(m.get_real(times[i]->name));
        if (i > 0 && !(values[i - 1] < values[i]))
            throw std::logic_error("model schedules two events at the same time");
    }
    return plan_from_schedule(events, values);
}

std::optional<std::size_t> min_plan_length(const TemporalPlanningProblem& problem, std::size_t max_len,
                                           std::size_t node_budget)
{
    PlannerConfig pc;
    pc.max_path_len = max_len;
    pc.node_budget = node_budget;
    PlanOutcome o = plan(problem, PrefixTrie{}, pc);
    if (o.status == PlanOutcome::Status::Found)
        return o.plan->events().size();
    if (o.status == PlanOutcome::Status::Exhausted)
        return max_len + 1;
    return std::nullopt;
}

SolveResult pamp_enc(const PampProblem& input, const EngineConfig& cfg)
{
    PampProblem p = with_kappa(input, cfg);
    Budget budget(cfg.time_budget_seconds);
    SolveResult r;
    r.stats.mode = "enc";
    auto done = [&](SolveResult out) {
        out.stats.wall_seconds = budget.elapsed();
        return out;
    };

    std::size_t first = 1;
    if (auto lo = min_plan_length(p.problem, cfg.max_h, cfg.node_budget))
        first = std::max<std::size_t>(1, *lo);
    for (std::size_t h = first; h <= cfg.max_h; ++h) {
        // Plans have an even number of events; an odd bound only adds an
        // idle step and a longer trace over the previous one.
        if (h != first && h % 2 == 1)
            continue;
        if (budget.exhausted()) {
            r.reason = "timeout";
            return done(r);
        }
        r.stats.horizon = h;
        ++r.stats.iterations;
        enc::Phi phi = enc::build_phi(p, h);
        smt::Result res = smt::solve(phi.query, budget.cap(cfg.solver));
        r.stats.solver_calls += res.solver_calls;
        if (res.unsat())
            continue;
        if (!res.sat()) {
            r.reason = res.reason;
            return done(r);
        }
        TimeTriggeredPlan plan;
        try {
            plan = extract_plan(p.problem, res.model, phi.plan);
        } catch (const std::logic_error& e) {
            r.reason = std::string("internal: ") + e.what();
            return done(r);
        }
        return done(finish(p, r, plan));
    }
    r.verdict = SolveResult::Verdict::NoSolutionWithinBounds;
    return done(r);
}

constexpr double full_probe_seconds = 1;

CheckOutcome check(const PampProblem& p, const StnPlan& candidate, const smt::SolverConfig& cfg)
{
    CheckOutcome out;
    const auto events = path(candidate);
    const std::size_t n = events.size();
    auto query = [&](std::size_t i, const smt::SolverConfig& c) {
        enc::CheckPhi phi = enc::build_check_phi(p, events, i);
        smt::Result res = smt::solve(phi.query, c);
        out.solver_calls += res.solver_calls;
        return std::pair{std::move(phi), std::move(res)};
    };
    // Prefix queries are monotone: a Sat full ordering makes every prefix Sat.
    // The full ordering is therefore probed first under a short limit, since
    // passing candidates then cost one query; failing candidates fall back to
    // the scan for the shortest failing prefix. Unsat full orderings can be
    // slow to refute, hence the limit.
    smt::SolverConfig probe = cfg;
    if (probe.timeout_seconds <= 0 || probe.timeout_seconds > full_probe_seconds)
        probe.timeout_seconds = full_probe_seconds;
    auto [full_phi, full] = query(n, probe);
    if (full.sat()) {
        try {
            out.plan = extract_plan(full.model, events, full_phi.times);
        } catch (const std::logic_error& e) {
            out.reason = std::string("internal: ") + e.what();
            return out;
        }
        out.status = CheckOutcome::Status::Pass;
        return out;
    }
    for (std::size_t i = 1; i < n; ++i) {
        auto [phi, res] = query(i, cfg);
        if (res.unsat()) {
            out.status = CheckOutcome::Status::Fail;
            out.prefix.assign(events.begin(), events.begin() + static_cast<std::ptrdiff_t>(i));
            return out;
        }
        if (!res.sat()) {
            out.reason = res.reason;
            return out;
        }
    }
    if (!full.unsat())
        std::tie(full_phi, full) = query(n, cfg);
    if (full.unsat()) {
        out.status = CheckOutcome::Status::Fail;
        out.prefix = events;
    } else if (full.sat()) {
        try {
            out.plan = extract_plan(full.model, events, full_phi.times);
        } catch (const std::logic_error& e) {
            out.reason = std::string("internal: ") + e.what();
            return out;
        }
        out.status = CheckOutcome::Status::Pass;
    } else {
        out.reason = full.reason;
    }
    return out;
}

SolveResult pamp_ref(const PampProblem& input, const EngineConfig& cfg)
{
    PampProblem p = with_kappa(input, cfg);
    Budget budget(cfg.time_budget_seconds);
    SolveResult r;
    r.stats.mode = "ref";
    auto done = [&](SolveResult out) {
        out.stats.wall_seconds = budget.elapsed();
        return out;
    };

    PrefixTrie trie;
    PlannerConfig pc;
    pc.strategy = cfg.search;
    pc.max_path_len = cfg.max_path_len;
    pc.node_budget = cfg.node_budget;
    while (true) {
        if (budget.exhausted()) {
            r.reason = "timeout";
            return done(r);
        }
        PlanOutcome o = plan(p.problem, trie, pc);
        if (o.status == PlanOutcome::Status::Exhausted) {
            r.verdict = SolveResult::Verdict::NoSolutionWithinBounds;
            return done(r);
        }
        if (o.status == PlanOutcome::Status::BudgetExceeded) {
            r.reason = "planner node budget exhausted";
            return done(r);
        }
        // Iterative deepening returns shortest candidates first, so the last
        // candidate length bounds the search depth reached.
        pc.min_path_len = cfg.search == SearchStrategy::IterativeDeepening ? o.plan->events().size() : 0;
        ++r.stats.iterations;
        r.stats.horizon = o.plan->events().size();
        CheckOutcome c = check(p, *o.plan, budget.cap(cfg.solver));
        r.stats.solver_calls += c.solver_calls;
        if (c.status == CheckOutcome::Status::Pass)
            return done(finish(p, r, c.plan));
        if (c.status == CheckOutcome::Status::Unknown) {
            r.reason = c.reason;
            return done(r);
        }
        if (!trie.insert(c.prefix)) {
            r.reason = "internal: learned prefix already forbidden";
            return done(r);
        }
        r.learned.push_back(c.prefix);
        r.stats.learned_prefixes = trie.size();
    }
}

SolveResult solve(const PampProblem& p, const EngineConfig& cfg)
{
    return cfg.mode == Mode::Enc ? pamp_enc(p, cfg) : pamp_ref(p, cfg);
}

} // namespace pamp
