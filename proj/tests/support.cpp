#include "support.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

namespace pamp::test
{

namespace
{

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

std::vector<PropId> random_subset(Rng& rng, std::size_t n, double p)
{
    std::vector<PropId> out;
    for (PropId q = 0; q < n; ++q)
        if (coin(rng, p))
            out.push_back(q);
    return out;
}

ClockConstraint random_constraint(Rng& rng, std::size_t clocks, int max_constant, int max_atoms)
{
    static constexpr CmpOp ops[] = {CmpOp::Le, CmpOp::Lt, CmpOp::Eq, CmpOp::Ge, CmpOp::Gt};
    ClockConstraint g;
    int atoms = uniform(rng, 0, max_atoms);
    for (int i = 0; i < atoms; ++i) {
        ClockAtom a;
        a.x = static_cast<ClockId>(uniform(rng, 0, static_cast<int>(clocks) - 1));
        if (clocks > 1 && coin(rng, 0.2)) {
            ClockId y = static_cast<ClockId>(uniform(rng, 0, static_cast<int>(clocks) - 1));
            if (y != a.x)
                a.y = y;
        }
        a.op = ops[uniform(rng, 0, 4)];
        a.n = uniform(rng, a.y ? -max_constant : 0, max_constant);
        g.atoms.push_back(a);
    }
    return g;
}

} // namespace

PampProblem random_pamp(Rng& rng, const RandomShape& shape)
{
    PampProblem p;
    auto& tp = p.problem;

    const int n_actions = uniform(rng, 1, shape.max_actions);
    const int n_props = uniform(rng, 1, 3);
    for (int q = 0; q < n_props; ++q) {
        tp.props.push_back("p" + std::to_string(q));
        tp.init.push_back(coin(rng));
    }
    for (int a = 0; a < n_actions; ++a) {
        DurativeAction act;
        act.name = "A" + std::to_string(a);
        act.base_name = act.name;
        auto effects = [&](SnapActionSpec& s) {
            s.pre = random_subset(rng, tp.props.size(), 0.25);
            for (PropId q = 0; q < tp.props.size(); ++q) {
                int r = uniform(rng, 0, 5);
                if (r == 0)
                    s.add.push_back(q);
                else if (r == 1)
                    s.del.push_back(q);
            }
        };
        effects(act.start);
        effects(act.end);
        act.overall = random_subset(rng, tp.props.size(), 0.1);
        act.dur_lo = uniform(rng, 1, 3);
        if (coin(rng, 0.7))
            act.dur_hi = act.dur_lo + uniform(rng, 0, 3);
        tp.actions.push_back(std::move(act));
    }
    // The goal is something some end snap can produce, so that a share of the
    // instances is solvable at the planning level.
    {
        std::vector<PropId> producible;
        for (const auto& act : tp.actions)
            producible.insert(producible.end(), act.end.add.begin(), act.end.add.end());
        if (!producible.empty())
            tp.goal.push_back(producible[uniform(rng, 0, static_cast<int>(producible.size()) - 1)]);
        else if (coin(rng))
            tp.goal.push_back(0);
    }

    auto& ta = p.platform;
    const int n_locations = uniform(rng, 2, shape.max_locations);
    const int n_clocks = uniform(rng, 1, shape.max_clocks);
    for (int l = 0; l < n_locations; ++l)
        ta.locations.push_back("L" + std::to_string(l));
    ta.clocks.push_back("gamma");
    for (int c = 1; c < n_clocks; ++c)
        ta.clocks.push_back("x" + std::to_string(c));
    ta.global_clock = 0;
    ta.initial = 0;
    for (int l = 0; l < n_locations; ++l) {
        ClockConstraint inv;
        if (shape.invariants && n_clocks > 1 && coin(rng, 0.25)) {
            ClockAtom a;
            a.x = static_cast<ClockId>(uniform(rng, 1, n_clocks - 1));
            a.op = coin(rng) ? CmpOp::Le : CmpOp::Lt;
            a.n = uniform(rng, 1, shape.max_constant);
            inv.atoms.push_back(a);
        }
        ta.invariants.push_back(inv);
    }

    auto random_transition = [&](Label label) {
        Transition t;
        t.src = static_cast<LocationId>(uniform(rng, 0, n_locations - 1));
        t.dst = static_cast<LocationId>(uniform(rng, 0, n_locations - 1));
        t.label = std::move(label);
        t.guard = random_constraint(rng, ta.clocks.size(), shape.max_constant, 1);
        for (ClockId c = 1; c < ta.clocks.size(); ++c)
            if (coin(rng, 0.4))
                t.resets.push_back(c);
        return t;
    };
    for (ActionId a = 0; a < tp.actions.size(); ++a)
        for (SnapKind k : {SnapKind::Start, SnapKind::End}) {
            int copies = uniform(rng, 1, 2);
            for (int i = 0; i < copies; ++i) {
                Transition t = random_transition(Label::snap({a, k}));
                // Bias the first copy towards being reachable early.
                if (i == 0 && coin(rng, 0.5))
                    t.src = 0;
                ta.transitions.push_back(std::move(t));
            }
        }
    if (shape.total)
        for (LocationId l = 0; l < ta.locations.size(); ++l)
            for (ActionId a = 0; a < tp.actions.size(); ++a)
                for (SnapKind k : {SnapKind::Start, SnapKind::End})
                    ta.transitions.push_back({l, {}, Label::snap({a, k}), {}, l});
    int taus = uniform(rng, 0, 2);
    for (int i = 0; i < taus; ++i)
        ta.transitions.push_back(random_transition(Label::tau()));

    if (coin(rng, 0.85)) {
        BadEntry b;
        b.location = static_cast<LocationId>(uniform(rng, 1, n_locations - 1));
        if (shape.bad_guards && coin(rng, 0.4))
            b.guard = random_constraint(rng, ta.clocks.size(), shape.max_constant, 1);
        p.bad.entries.push_back(b);
    }
    p.kappa = uniform(rng, shape.min_kappa, shape.max_kappa);
    p.check();
    return p;
}

TimeTriggeredPlan random_plan(Rng& rng, const TemporalPlanningProblem& problem, int max_entries)
{
    for (int attempt = 0; attempt < 1000; ++attempt) {
        TimeTriggeredPlan plan;
        const int n = uniform(rng, 0, max_entries);
        for (int i = 0; i < n; ++i) {
            ActionId a = static_cast<ActionId>(uniform(rng, 0, static_cast<int>(problem.actions.size()) - 1));
            const auto& act = problem.actions[a];
            int lo = static_cast<int>(act.dur_lo.get_num().get_si()); // generated bounds are integers
            int hi = act.dur_hi ? static_cast<int>(act.dur_hi->get_num().get_si()) : lo + 4;
            plan.entries.push_back({a, Rational(uniform(rng, 0, 10)), Rational(uniform(rng, lo, hi))});
        }
        try {
            (void)plan_to_snap_sequence(problem, plan);
            return plan;
        } catch (const PlanError&) {
        }
    }
    return {};
}

bool bellman_ford_consistent(std::size_t n, const std::vector<DiffEdge>& edges)
{
    // Plain Bellman-Ford on the values finds negative cycles. A zero cycle
    // is made only of edges that are tight under the resulting potentials,
    // so the system is also inconsistent iff some strict tight edge closes a
    // cycle of tight edges.
    std::vector<Rational> dist(n, Rational(0));
    bool changed = true;
    for (std::size_t round = 0; changed; ++round) {
        if (round > n)
            return false;
        changed = false;
        for (const auto& e : edges)
            if (dist[e.from] + e.value < dist[e.to]) {
                dist[e.to] = dist[e.from] + e.value;
                changed = true;
            }
    }
    std::vector<std::vector<std::size_t>> tight(n);
    for (const auto& e : edges)
        if (dist[e.from] + e.value == dist[e.to])
            tight[e.from].push_back(e.to);
    auto reaches = [&](std::size_t from, std::size_t to) {
        std::vector<bool> seen(n, false);
        std::vector<std::size_t> stack{from};
        seen[from] = true;
        while (!stack.empty()) {
            std::size_t u = stack.back();
            stack.pop_back();
            if (u == to)
                return true;
            for (std::size_t v : tight[u])
                if (!seen[v]) {
                    seen[v] = true;
                    stack.push_back(v);
                }
        }
        return false;
    };
    for (const auto& e : edges)
        if (e.strict && dist[e.from] + e.value == dist[e.to] && reaches(e.to, e.from))
            return false;
    return true;
}

TimeTriggeredPlan named_plan(const TemporalPlanningProblem& problem,
                             const std::vector<std::tuple<std::string, Rational, Rational>>& entries)
{
    TimeTriggeredPlan out;
    std::map<std::string, std::size_t> next_copy;
    for (const auto& [name, start, duration] : entries) {
        std::optional<ActionId> id = problem.find_action(name);
        if (!id) {
            std::size_t k = next_copy[name]++;
            for (ActionId a = 0; a < problem.actions.size() && !id; ++a)
                if (problem.actions[a].base_name == name && problem.actions[a].name != name && k-- == 0)
                    id = a;
        }
        if (!id)
            throw std::invalid_argument("no action named " + name);
        out.entries.push_back({*id, start, duration});
    }
    return out;
}

TimeTriggeredPlan factory_plan(const TemporalPlanningProblem& problem,
                               std::vector<std::tuple<std::string, Rational, Rational>> entries)
{
    static const std::map<std::string, std::string> full{{"P", "Process"}, {"W", "Work"}, {"C", "Cooldown"}};
    for (auto& e : entries)
        if (auto it = full.find(std::get<0>(e)); it != full.end())
            std::get<0>(e) = it->second;
    return named_plan(problem, entries);
}

Rational q(long n, long d)
{
    Rational r(n, d);
    r.canonicalize();
    return r;
}

namespace
{

// Difference constraints of an ordering: variable 0 is the origin, i + 1 the
// time of event i.
bool schedulable(const TemporalPlanningProblem& problem, const std::vector<SnapEventRef>& events)
{
    const std::size_t n = events.size();
    std::vector<DiffEdge> edges;
    std::map<ActionId, std::size_t> started;
    for (std::size_t i = 0; i < n; ++i) {
        edges.push_back({i + 1, 0, Rational(0), false}); // 0 - x_i <= 0
        if (i > 0)
            edges.push_back({i + 1, i, Rational(0), true}); // x_{i-1} - x_i < 0
        const auto& ev = events[i];
        if (ev.kind == SnapKind::Start) {
            started[ev.action] = i;
            continue;
        }
        const auto& a = problem.actions[ev.action];
        std::size_t s = started.at(ev.action);
        edges.push_back({i + 1, s + 1, -a.dur_lo, false}); // x_s - x_i <= -lo
        if (a.dur_hi)
            edges.push_back({s + 1, i + 1, *a.dur_hi, false}); // x_i - x_s <= hi
    }
    return bellman_ford_consistent(n + 1, edges);
}

struct Enumerator
{
    const TemporalPlanningProblem& problem;
    const PrefixFilter& forbidden;
    std::vector<SnapEventRef> all;
    std::vector<SnapEventRef> path;

    bool search(std::vector<bool> state, std::vector<bool> open, std::size_t depth)
    {
        bool closed = std::none_of(open.begin(), open.end(), [](bool b) { return b; });
        bool goal = std::all_of(problem.goal.begin(), problem.goal.end(), [&](PropId g) { return state[g]; });
        if (closed && goal && path.size() == depth && schedulable(problem, path))
            return true;
        if (path.size() == depth)
            return false;
        for (const auto& ev : all) {
            bool is_start = ev.kind == SnapKind::Start;
            if (open[ev.action] == is_start)
                continue;
            const auto& a = problem.actions[ev.action];
            const auto& spec = is_start ? a.start : a.end;
            if (!std::all_of(spec.pre.begin(), spec.pre.end(), [&](PropId p) { return state[p]; }))
                continue;
            std::vector<bool> next = state;
            for (PropId p : spec.del)
                next[p] = false;
            for (PropId p : spec.add)
                next[p] = true;
            std::vector<bool> next_open = open;
            next_open[ev.action] = is_start;
            bool overall = true;
            for (ActionId b = 0; b < next_open.size(); ++b)
                if (next_open[b])
                    for (PropId p : problem.actions[b].overall)
                        overall = overall && next[p];
            if (!overall)
                continue;
            path.push_back(ev);
            if (!(forbidden && forbidden(path)) && search(next, next_open, depth))
                return true;
            path.pop_back();
        }
        return false;
    }
};

} // namespace

std::optional<std::vector<SnapEventRef>> brute_force_plan(const TemporalPlanningProblem& problem,
                                                          std::size_t max_events, const PrefixFilter& forbidden)
{
    Enumerator e{problem, forbidden, {}, {}};
    for (ActionId a = 0; a < problem.actions.size(); ++a)
        for (SnapKind k : {SnapKind::Start, SnapKind::End})
            e.all.push_back({a, k});
    for (std::size_t depth = 0; depth <= max_events; ++depth) {
        e.path.clear();
        if (e.search(problem.init, std::vector<bool>(problem.actions.size(), false), depth))
            return e.path;
    }
    return std::nullopt;
}

} // namespace pamp::test
