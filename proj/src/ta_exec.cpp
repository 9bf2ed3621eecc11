#include "pamp/ta_exec.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace pamp
{

// ---------------------------------------------------------------------------
// Zone algebra

bool Zone::contains(const Valuation& u) const
{
    std::vector<Rational> point;
    point.reserve(u.size() + 1);
    point.emplace_back(0);
    point.insert(point.end(), u.begin(), u.end());
    return dbm.contains_point(point);
}

void constrain_difference(Dbm& d, std::size_t pos, std::size_t neg, CmpOp op, const Rational& n)
{
    switch (op) {
    case CmpOp::Le:
        d.constrain(pos, neg, Bound::le(n));
        break;
    case CmpOp::Lt:
        d.constrain(pos, neg, Bound::lt(n));
        break;
    case CmpOp::Ge:
        d.constrain(neg, pos, Bound::le(-n));
        break;
    case CmpOp::Gt:
        d.constrain(neg, pos, Bound::lt(-n));
        break;
    case CmpOp::Eq:
        d.constrain(pos, neg, Bound::le(n));
        d.constrain(neg, pos, Bound::le(-n));
        break;
    }
}

Zone zone_origin(std::size_t clocks) { return Zone{Dbm::zero(clocks + 1)}; }

Zone zone_up(const Zone& z)
{
    Zone out = z;
    out.dbm.up();
    return out;
}

Zone zone_constrain(const Zone& z, const ClockAtom& a)
{
    Zone out = z;
    if (a.x + 1 >= z.dbm.dim() || (a.y && *a.y + 1 >= z.dbm.dim()))
        throw ModelError("clock constraint refers to an unknown clock");
    constrain_difference(out.dbm, a.x + 1, a.y ? *a.y + 1 : 0, a.op, Rational{a.n});
    return out;
}

Zone zone_constrain(const Zone& z, const ClockConstraint& g)
{
    Zone out = z;
    for (const auto& a : g.atoms) {
        if (out.empty())
            break;
        out = zone_constrain(out, a);
    }
    return out;
}

Zone zone_reset(const Zone& z, const std::vector<ClockId>& resets)
{
    Zone out = z;
    for (ClockId c : resets)
        out.dbm.reset(c + 1);
    return out;
}

Valuation zone_sample(const Zone& z)
{
    auto values = z.dbm.sample();
    return Valuation(values.begin() + 1, values.end());
}

std::size_t trace_bound(int kappa, std::size_t plan_length)
{
    return static_cast<std::size_t>(kappa) * std::max<std::size_t>(1, plan_length);
}

// ---------------------------------------------------------------------------
// Exploration

namespace
{

CmpOp flip(CmpOp op)
{
    switch (op) {
    case CmpOp::Le:
        return CmpOp::Ge;
    case CmpOp::Lt:
        return CmpOp::Gt;
    case CmpOp::Ge:
        return CmpOp::Le;
    case CmpOp::Gt:
        return CmpOp::Lt;
    case CmpOp::Eq:
        return CmpOp::Eq;
    }
    return op;
}

bool compare(const Rational& lhs, CmpOp op, const Rational& rhs)
{
    switch (op) {
    case CmpOp::Le:
        return lhs <= rhs;
    case CmpOp::Lt:
        return lhs < rhs;
    case CmpOp::Eq:
        return lhs == rhs;
    case CmpOp::Ge:
        return lhs >= rhs;
    case CmpOp::Gt:
        return lhs > rhs;
    }
    return false;
}

// The set of valuations from which a transition can be taken: its guard and
// the target invariant rewritten over pre-reset values. nullopt when the
// rewritten invariant is unsatisfiable.
std::optional<std::vector<ClockAtom>> enabling_atoms(const TimedAutomaton& ta, const Transition& t)
{
    std::vector<ClockAtom> atoms = t.guard.atoms;
    auto is_reset = [&](ClockId c) { return std::find(t.resets.begin(), t.resets.end(), c) != t.resets.end(); };
    for (const auto& a : ta.invariants[t.dst].atoms) {
        bool xr = is_reset(a.x);
        bool yr = a.y && is_reset(*a.y);
        if (xr && (!a.y || yr)) {
            if (!compare(Rational{0}, a.op, Rational{a.n}))
                return std::nullopt;
        } else if (xr) {
            // 0 - y ~ n  <=>  y ~' -n
            atoms.push_back(ClockAtom{*a.y, std::nullopt, flip(a.op), -a.n});
        } else if (yr) {
            atoms.push_back(ClockAtom{a.x, std::nullopt, a.op, a.n});
        } else {
            atoms.push_back(a);
        }
    }
    return atoms;
}

std::vector<ClockAtom> negate(const ClockAtom& a)
{
    ClockAtom b = a;
    switch (a.op) {
    case CmpOp::Le:
        b.op = CmpOp::Gt;
        return {b};
    case CmpOp::Lt:
        b.op = CmpOp::Ge;
        return {b};
    case CmpOp::Ge:
        b.op = CmpOp::Lt;
        return {b};
    case CmpOp::Gt:
        b.op = CmpOp::Le;
        return {b};
    case CmpOp::Eq: {
        ClockAtom c = a;
        b.op = CmpOp::Lt;
        c.op = CmpOp::Gt;
        return {b, c};
    }
    }
    return {};
}

// Finds a non-empty part of z where no enabling set applies. `chosen`
// collects the negated atoms that carve it out.
bool uncovered_cell(const Zone& z, const std::vector<std::vector<ClockAtom>>& enablers, std::size_t idx,
                    std::vector<ClockAtom>& chosen)
{
    if (z.empty())
        return false;
    if (idx == enablers.size())
        return true;
    const auto& e = enablers[idx];
    if (e.empty())
        return false;
    for (const auto& atom : e) {
        for (const auto& neg : negate(atom)) {
            Zone sub = zone_constrain(z, neg);
            if (sub.empty())
                continue;
            chosen.push_back(neg);
            if (uncovered_cell(sub, enablers, idx + 1, chosen))
                return true;
            chosen.pop_back();
        }
    }
    return false;
}

struct Node
{
    LocationId loc = 0;
    Zone zone;
    std::size_t index = 1; // state index within the run, starting at 1
    std::size_t fired = 0;
    bool marked = false;
    std::size_t mark_index = 0;
    std::size_t bad_entry = 0;
    std::optional<std::size_t> parent;
    PathStep step;
};

struct Violation
{
    std::size_t node = 0;
    Witness::Obligation obligation = Witness::Obligation::Executability;
    std::vector<ClockAtom> final_atoms;
};

class Explorer
{
public:
    struct Options
    {
        std::size_t events = 0;      // number of rho events that must be matched
        std::size_t trace_states = 1; // K
        bool bound_after_last = true; // γ <= t_n once every event fired
        bool check_exec = false;
        const BadStateSpec* bad = nullptr;
        bool subsumption = true;
        bool bad_window = true; // bad states only count up to t_n
    };

    Explorer(const TimedAutomaton& ta, const TimedSnapSequence& rho, Options opt) : _ta(ta), _rho(rho), _opt(opt)
    {
        _gamma = ta.global_clock + 1;
    }

    std::optional<Violation> run()
    {
        Node root;
        root.loc = _ta.initial;
        root.zone = zone_constrain(zone_origin(_ta.clocks.size()), _ta.invariants[_ta.initial]);
        if (root.zone.empty())
            return std::nullopt;
        _nodes.push_back(root);
        remember(0);
        // Executability violations are reported at the smallest event index:
        // keep exploring nodes that have fired fewer events than the best one
        // found so far. Descendants never fire fewer events than their parent.
        std::optional<Violation> earliest;
        std::deque<std::size_t> queue{0};
        while (!queue.empty()) {
            std::size_t id = queue.front();
            queue.pop_front();
            if (earliest && _nodes[id].fired >= _nodes[earliest->node].fired)
                continue;
            ++stats.nodes;
            if (auto v = inspect(id, queue)) {
                if (v->obligation == Witness::Obligation::Safety)
                    return v;
                earliest = v;
                continue;
            }
            expand(id, queue);
        }
        return earliest;
    }

    [[nodiscard]] const std::vector<Node>& nodes() const { return _nodes; }

    ExploreStats stats;

    [[nodiscard]] std::optional<Rational> gamma_bound(std::size_t fired) const
    {
        if (fired < _opt.events)
            return _rho[fired].time;
        if (!_opt.bound_after_last)
            return std::nullopt;
        return _opt.events == 0 ? Rational{0} : _rho[_opt.events - 1].time;
    }

private:
    Zone bound_gamma(const Zone& z, std::size_t fired) const
    {
        Zone out = z;
        if (auto b = gamma_bound(fired))
            constrain_difference(out.dbm, _gamma, 0, CmpOp::Le, *b);
        return out;
    }

    std::optional<Violation> inspect(std::size_t id, std::deque<std::size_t>& queue)
    {
        const Node node = _nodes[id];
        if (node.marked) {
            if (node.fired == _opt.events)
                return Violation{id, Witness::Obligation::Safety, {}};
            return std::nullopt;
        }
        if (_opt.check_exec && node.fired < _opt.events) {
            Zone at_event = node.zone;
            constrain_difference(at_event.dbm, _gamma, 0, CmpOp::Eq, _rho[node.fired].time);
            if (!at_event.empty()) {
                std::vector<std::vector<ClockAtom>> enablers;
                for (const auto& t : _ta.transitions) {
                    if (t.src != node.loc || !t.label.matches(_rho[node.fired].event))
                        continue;
                    if (auto e = enabling_atoms(_ta, t))
                        enablers.push_back(std::move(*e));
                }
                std::vector<ClockAtom> chosen;
                if (uncovered_cell(at_event, enablers, 0, chosen))
                    return Violation{id, Witness::Obligation::Executability, chosen};
            }
        }
        if (_opt.bad) {
            const auto& entries = _opt.bad->entries;
            for (std::size_t b = 0; b < entries.size(); ++b) {
                if (entries[b].location != node.loc)
                    continue;
                Zone hit = zone_constrain(node.zone, entries[b].guard);
                if (_opt.bad_window) {
                    Rational horizon = _opt.events == 0 ? Rational{0} : _rho[_opt.events - 1].time;
                    constrain_difference(hit.dbm, _gamma, 0, CmpOp::Le, horizon);
                }
                if (hit.empty())
                    continue;
                Node m = node;
                m.zone = hit;
                m.marked = true;
                m.mark_index = node.index;
                m.bad_entry = b;
                m.parent = node.parent;
                m.step = node.step;
                if (node.fired == _opt.events) {
                    _nodes.push_back(m);
                    return Violation{_nodes.size() - 1, Witness::Obligation::Safety, {}};
                }
                if (push(m))
                    queue.push_back(_nodes.size() - 1);
                break;
            }
        }
        return std::nullopt;
    }

    void expand(std::size_t id, std::deque<std::size_t>& queue)
    {
        const Node node = _nodes[id];
        if (node.index >= _opt.trace_states)
            return;
        {
            Zone z = bound_gamma(zone_constrain(zone_up(node.zone), _ta.invariants[node.loc]), node.fired);
            Node child = node;
            child.zone = std::move(z);
            child.index = node.index + 1;
            child.parent = id;
            child.step = PathStep{PathStep::stutter, std::nullopt};
            if (!child.zone.empty() && push(child))
                queue.push_back(_nodes.size() - 1);
        }
        for (std::size_t ti = 0; ti < _ta.transitions.size(); ++ti) {
            const auto& t = _ta.transitions[ti];
            if (t.src != node.loc)
                continue;
            Zone z = node.zone;
            std::size_t fired = node.fired;
            std::optional<std::size_t> matched;
            if (t.label.is_snap()) {
                if (fired >= _opt.events || !t.label.matches(_rho[fired].event))
                    continue;
                constrain_difference(z.dbm, _gamma, 0, CmpOp::Eq, _rho[fired].time);
                matched = fired;
                ++fired;
            }
            z = zone_constrain(z, t.guard);
            if (z.empty())
                continue;
            z = zone_reset(z, t.resets);
            z = zone_constrain(z, _ta.invariants[t.dst]);
            if (z.empty())
                continue;
            z = zone_constrain(zone_up(z), _ta.invariants[t.dst]);
            z = bound_gamma(z, fired);
            if (z.empty())
                continue;
            Node child;
            child.loc = t.dst;
            child.zone = std::move(z);
            child.index = node.index + 1;
            child.fired = fired;
            child.marked = node.marked;
            child.mark_index = node.mark_index;
            child.bad_entry = node.bad_entry;
            child.parent = id;
            child.step = PathStep{ti, matched};
            if (push(child))
                queue.push_back(_nodes.size() - 1);
        }
    }

    bool push(const Node& n)
    {
        if (_opt.subsumption) {
            auto& seen = _visited[std::make_tuple(n.loc, n.fired, n.marked)];
            for (std::size_t other : seen)
                if (_nodes[other].index <= n.index && _nodes[other].zone.includes(n.zone)) {
                    ++stats.subsumed;
                    return false;
                }
        }
        _nodes.push_back(n);
        remember(_nodes.size() - 1);
        return true;
    }

    void remember(std::size_t id)
    {
        const Node& n = _nodes[id];
        _visited[std::make_tuple(n.loc, n.fired, n.marked)].push_back(id);
    }

    const TimedAutomaton& _ta;
    const TimedSnapSequence& _rho;
    Options _opt;
    std::size_t _gamma = 1;
    std::vector<Node> _nodes;
    std::map<std::tuple<LocationId, std::size_t, bool>, std::vector<std::size_t>> _visited;

    friend Witness build_witness(const Explorer&, const Violation&);
};

void add_state_atom(Dbm& d, const ClockAtom& a, std::size_t j, const std::vector<std::size_t>& reset_at)
{
    std::size_t pos = a.y ? reset_at[*a.y] : j;
    std::size_t neg = reset_at[a.x];
    constrain_difference(d, pos, neg, a.op, Rational{a.n});
}

// Concretizes a symbolic violation by solving the difference constraints over
// the timestamps T_1..T_m of the states along its path.
Witness build_witness(const Explorer& ex, const Violation& v)
{
    const auto& nodes = ex._nodes;
    const auto& ta = ex._ta;
    const auto& rho = ex._rho;

    std::vector<const Node*> chain;
    for (std::optional<std::size_t> cur = v.node; cur; cur = nodes[*cur].parent)
        chain.push_back(&nodes[*cur]);
    std::reverse(chain.begin(), chain.end());
    const Node& last = *chain.back();
    const std::size_t m = chain.size();

    Dbm d(m + 1);
    constrain_difference(d, 1, 0, CmpOp::Eq, Rational{0});
    std::vector<std::size_t> reset_at(ta.clocks.size(), 0);
    std::vector<std::vector<std::size_t>> resets_per_state;
    std::size_t fired = 0;
    for (std::size_t j = 1; j <= m; ++j) {
        const Node& cur = *chain[j - 1];
        resets_per_state.push_back(reset_at);
        for (const auto& a : ta.invariants[cur.loc].atoms)
            add_state_atom(d, a, j, reset_at);
        if (auto b = ex.gamma_bound(fired))
            constrain_difference(d, j, 0, CmpOp::Le, *b);
        if (j == m)
            break;
        const Node& next = *chain[j];
        constrain_difference(d, j + 1, j, CmpOp::Ge, Rational{0});
        if (next.step.transition == PathStep::stutter)
            continue;
        const auto& t = ta.transitions[next.step.transition];
        for (const auto& a : t.guard.atoms)
            add_state_atom(d, a, j, reset_at);
        if (next.step.matched_event) {
            constrain_difference(d, j, 0, CmpOp::Eq, rho[*next.step.matched_event].time);
            ++fired;
        }
        for (ClockId c : t.resets)
            reset_at[c] = j;
        for (const auto& a : ta.invariants[t.dst].atoms)
            add_state_atom(d, a, j, reset_at);
    }
    for (const auto& a : v.final_atoms)
        add_state_atom(d, a, m, reset_at);
    if (v.obligation == Witness::Obligation::Executability)
        constrain_difference(d, m, 0, CmpOp::Eq, rho[last.fired].time);
    if (v.obligation == Witness::Obligation::Safety) {
        const std::size_t j = last.mark_index;
        const auto& entry = ex._opt.bad->entries[last.bad_entry];
        for (const auto& a : entry.guard.atoms)
            add_state_atom(d, a, j, resets_per_state[j - 1]);
        if (ex._opt.bad_window) {
            Rational horizon = ex._opt.events == 0 ? Rational{0} : rho[ex._opt.events - 1].time;
            constrain_difference(d, j, 0, CmpOp::Le, horizon);
        }
    }

    auto times = d.sample();

    Witness w;
    w.obligation = v.obligation;
    w.initial = TAState{ta.initial, Valuation(ta.clocks.size(), Rational{0})};
    TAState state = w.initial;
    for (std::size_t j = 1; j < m; ++j) {
        const Node& next = *chain[j];
        WitnessStep fire;
        if (next.step.transition == PathStep::stutter) {
            fire.kind = WitnessStep::Kind::Delay;
            fire.delay = 0;
        } else {
            const auto& t = ta.transitions[next.step.transition];
            fire.kind = WitnessStep::Kind::Fire;
            fire.transition = next.step.transition;
            fire.matched_event = next.step.matched_event;
            state.location = t.dst;
            state.valuation = apply_reset(state.valuation, t.resets);
        }
        fire.after = state;
        w.run.push_back(fire);

        WitnessStep delay;
        delay.kind = WitnessStep::Kind::Delay;
        delay.delay = times[j + 1] - times[j];
        state.valuation = delay_valuation(state.valuation, delay.delay);
        delay.after = state;
        w.run.push_back(delay);
    }
    if (v.obligation == Witness::Obligation::Executability)
        w.event_index = last.fired;
    else {
        w.bad_step = 2 * (last.mark_index - 1);
        w.bad_entry = last.bad_entry;
    }
    return w;
}

Explorer::Options base_options(const TimedSnapSequence& rho, std::size_t trace_states)
{
    Explorer::Options opt;
    opt.events = rho.size();
    opt.trace_states = trace_states;
    return opt;
}

} // namespace

std::vector<SymbolicRunNode> enumerate_compliant_runs(const TimedAutomaton& ta, const TimedSnapSequence& rho,
                                                      std::size_t prefix_len, std::size_t step_bound,
                                                      bool subsumption)
{
    Explorer::Options opt;
    opt.events = std::min(prefix_len, rho.size());
    opt.trace_states = step_bound + 1;
    opt.bound_after_last = false;
    opt.subsumption = subsumption;
    Explorer ex(ta, rho, opt);
    ex.run();

    std::vector<SymbolicRunNode> out;
    const auto& nodes = ex.nodes();
    for (std::size_t id = 0; id < nodes.size(); ++id) {
        SymbolicRunNode n;
        n.location = nodes[id].loc;
        n.zone = nodes[id].zone;
        n.fired = nodes[id].fired;
        for (std::optional<std::size_t> cur = id; cur && nodes[*cur].parent; cur = nodes[*cur].parent)
            n.path.push_back(nodes[*cur].step);
        std::reverse(n.path.begin(), n.path.end());
        out.push_back(std::move(n));
    }
    return out;
}

std::vector<LocationId> reachable_after_locations(const TimedAutomaton& ta, const TimedSnapSequence& rho,
                                                  std::size_t step_bound)
{
    std::set<LocationId> locs;
    for (const auto& n : enumerate_compliant_runs(ta, rho, rho.size(), step_bound))
        if (n.fired == rho.size())
            locs.insert(n.location);
    return {locs.begin(), locs.end()};
}

std::vector<LocationId> reachable_locations(const TimedAutomaton& ta, const TimedSnapSequence& rho,
                                            std::size_t step_bound)
{
    // A location is visited by a complete run iff marking it as bad, with no
    // time window, yields a completed marked run.
    std::vector<LocationId> out;
    for (LocationId l = 0; l < ta.locations.size(); ++l) {
        BadStateSpec probe{{BadEntry{l, {}}}};
        Explorer::Options opt = base_options(rho, step_bound + 1);
        opt.bad = &probe;
        opt.bound_after_last = false;
        opt.bad_window = false;
        Explorer ex(ta, rho, opt);
        if (ex.run())
            out.push_back(l);
    }
    return out;
}

std::optional<Witness> check_executability(const TimedAutomaton& ta, const TimedSnapSequence& rho,
                                           std::size_t trace_states, ExploreStats* stats)
{
    Explorer::Options opt = base_options(rho, trace_states);
    opt.check_exec = true;
    Explorer ex(ta, rho, opt);
    auto v = ex.run();
    if (stats)
        *stats = ex.stats;
    if (!v)
        return std::nullopt;
    return build_witness(ex, *v);
}

std::optional<Witness> check_safety(const TimedAutomaton& ta, const TimedSnapSequence& rho, const BadStateSpec& bad,
                                    std::size_t trace_states, ExploreStats* stats)
{
    Explorer::Options opt = base_options(rho, trace_states);
    opt.bad = &bad;
    Explorer ex(ta, rho, opt);
    auto v = ex.run();
    if (stats)
        *stats = ex.stats;
    if (!v)
        return std::nullopt;
    return build_witness(ex, *v);
}

std::optional<Witness> check_executability(const PampProblem& p, const TimeTriggeredPlan& plan)
{
    auto rho = plan_to_snap_sequence(p.problem, plan);
    return check_executability(p.platform, rho, trace_bound(p.kappa, rho.size()));
}

std::optional<Witness> check_safety(const PampProblem& p, const TimeTriggeredPlan& plan)
{
    auto rho = plan_to_snap_sequence(p.problem, plan);
    return check_safety(p.platform, rho, p.bad, trace_bound(p.kappa, rho.size()));
}

// ---------------------------------------------------------------------------

std::optional<std::string> replay_witness(const TimedAutomaton& ta, const TimedSnapSequence& rho,
                                          const BadStateSpec& bad, const Witness& w)
{
    TAState state{ta.initial, Valuation(ta.clocks.size(), Rational{0})};
    if (!(state == w.initial))
        return "witness does not start in the initial state";
    if (!eval_clock_constraint(ta.invariants[state.location], state.valuation))
        return "initial invariant violated";
    const ClockId g = ta.global_clock;
    std::size_t fired = 0;
    std::optional<std::size_t> fired_at_bad;
    if (w.obligation == Witness::Obligation::Safety && w.bad_step == 0)
        fired_at_bad = 0;
    for (std::size_t s = 0; s < w.run.size(); ++s) {
        const auto& step = w.run[s];
        if (step.kind == WitnessStep::Kind::Delay) {
            if (step.delay < 0)
                return "negative delay";
            state.valuation = delay_valuation(state.valuation, step.delay);
            if (!eval_clock_constraint(ta.invariants[state.location], state.valuation))
                return "invariant violated after delay at step " + std::to_string(s);
        } else {
            if (step.transition >= ta.transitions.size())
                return "unknown transition";
            const auto& t = ta.transitions[step.transition];
            if (t.src != state.location)
                return "transition source mismatch at step " + std::to_string(s);
            if (!eval_clock_constraint(t.guard, state.valuation))
                return "guard false at step " + std::to_string(s);
            if (t.label.is_snap()) {
                if (fired >= rho.size() || !t.label.matches(rho[fired].event) ||
                    state.valuation[g] != rho[fired].time)
                    return "snap label fired out of plan order or time at step " + std::to_string(s);
                ++fired;
            }
            state.location = t.dst;
            state.valuation = apply_reset(state.valuation, t.resets);
            if (!eval_clock_constraint(ta.invariants[state.location], state.valuation))
                return "target invariant violated at step " + std::to_string(s);
        }
        if (fired < rho.size() && state.valuation[g] > rho[fired].time)
            return "run passes the time of an unmatched plan event";
        if (!(state == step.after))
            return "recorded state differs from the replayed one at step " + std::to_string(s);
        if (w.obligation == Witness::Obligation::Safety && w.bad_step == s + 1)
            fired_at_bad = fired;
    }

    if (w.obligation == Witness::Obligation::Executability) {
        if (w.event_index != fired || fired >= rho.size())
            return "executability witness does not stop before its event";
        if (state.valuation[g] != rho[fired].time)
            return "final state is not at the event time";
        if (is_applicable(ta, state, rho[fired].event))
            return "event is applicable in the final state";
        return std::nullopt;
    }

    if (w.bad_step > w.run.size() || !fired_at_bad)
        return "bad step index out of range";
    const TAState& b = w.state_at(w.bad_step);
    if (w.bad_entry >= bad.entries.size())
        return "bad entry index out of range";
    const auto& entry = bad.entries[w.bad_entry];
    if (entry.location != b.location || !eval_clock_constraint(entry.guard, b.valuation))
        return "marked state is not bad";
    Rational horizon = rho.empty() ? Rational{0} : rho.back().time;
    if (b.valuation[g] > horizon)
        return "bad state lies after the last plan event";
    if (fired != rho.size())
        return "run does not complete the plan";
    return std::nullopt;
}

std::string describe_witness(const TemporalPlanningProblem& problem, const TimedAutomaton& ta, const Witness& w)
{
    std::ostringstream os;
    auto state_str = [&](const TAState& s) {
        std::ostringstream ss;
        ss << ta.locations[s.location] << " {";
        for (ClockId c = 0; c < ta.clocks.size(); ++c)
            ss << (c ? ", " : "") << ta.clocks[c] << "=" << to_display_string(s.valuation[c]);
        ss << "}";
        return ss.str();
    };
    os << "  " << state_str(w.initial) << "\n";
    for (const auto& step : w.run) {
        if (step.kind == WitnessStep::Kind::Delay) {
            if (step.delay == 0)
                continue;
            os << "  --delay " << to_display_string(step.delay) << "--> " << state_str(step.after) << "\n";
        } else {
            os << "  --" << ta.label_name(problem, ta.transitions[step.transition].label) << "--> "
               << state_str(step.after) << "\n";
        }
    }
    return os.str();
}

std::string_view to_string(Verdict::Kind k)
{
    switch (k) {
    case Verdict::Kind::Solution:
        return "SOLUTION";
    case Verdict::Kind::InvalidPlan:
        return "INVALID-PLAN";
    case Verdict::Kind::NonExecutable:
        return "NON-EXECUTABLE";
    case Verdict::Kind::Unsafe:
        return "UNSAFE";
    }
    return "?";
}

Verdict validate_plan(const PampProblem& p, const TimeTriggeredPlan& plan)
{
    if (auto err = check_plan_valid(p.problem, plan))
        return Verdict{Verdict::Kind::InvalidPlan, *err, std::nullopt};
    auto rho = plan_to_snap_sequence(p.problem, plan);
    std::size_t k = trace_bound(p.kappa, rho.size());
    if (auto w = check_executability(p.platform, rho, k)) {
        std::string msg = event_name(p.problem, rho[w->event_index].event) + " at time " +
                          to_display_string(rho[w->event_index].time) + " is not applicable in " +
                          p.platform.locations[w->final_state().location];
        return Verdict{Verdict::Kind::NonExecutable, msg, std::move(w)};
    }
    if (auto w = check_safety(p.platform, rho, p.bad, k)) {
        const auto& s = w->state_at(w->bad_step);
        std::string msg = "bad state " + p.platform.locations[s.location] + " reachable at time " +
                          to_display_string(s.valuation[p.platform.global_clock]);
        return Verdict{Verdict::Kind::Unsafe, msg, std::move(w)};
    }
    return Verdict{Verdict::Kind::Solution, "plan is valid, executable and safe", std::nullopt};
}

} // namespace pamp
