#include "pamp/model.hpp"

#include <algorithm>
#include <set>

namespace pamp
{

std::optional<PropId> TemporalPlanningProblem::find_prop(std::string_view name) const
{
    for (PropId p = 0; p < props.size(); ++p)
        if (props[p] == name)
            return p;
    return std::nullopt;
}

std::optional<ActionId> TemporalPlanningProblem::find_action(std::string_view name) const
{
    for (ActionId a = 0; a < actions.size(); ++a)
        if (actions[a].name == name)
            return a;
    return std::nullopt;
}

namespace
{

void check_props(const TemporalPlanningProblem& p, const std::vector<PropId>& ids, const std::string& where)
{
    for (PropId id : ids)
        if (id >= p.props.size())
            throw ModelError(where + ": proposition id out of range");
}

void check_snap(const TemporalPlanningProblem& p, const SnapActionSpec& h, const std::string& where)
{
    check_props(p, h.pre, where);
    check_props(p, h.add, where);
    check_props(p, h.del, where);
    for (PropId a : h.add)
        if (std::find(h.del.begin(), h.del.end(), a) != h.del.end())
            throw ModelError(where + ": proposition '" + p.props[a] + "' is both added and deleted");
}

} // namespace

void TemporalPlanningProblem::check() const
{
    std::set<std::string> seen_props(props.begin(), props.end());
    if (seen_props.size() != props.size())
        throw ModelError("duplicate proposition name");
    if (init.size() != props.size())
        throw ModelError("initial state does not cover every proposition");
    check_props(*this, goal, "goal");
    std::set<std::string> seen;
    for (const auto& a : actions) {
        if (!seen.insert(a.name).second)
            throw ModelError("duplicate action name '" + a.name + "'");
        check_snap(*this, a.start, a.name + " start");
        check_snap(*this, a.end, a.name + " end");
        check_props(*this, a.overall, a.name + " overall");
        if (a.dur_lo <= 0)
            throw ModelError(a.name + ": lower duration bound must be positive");
        if (a.dur_hi && *a.dur_hi < a.dur_lo)
            throw ModelError(a.name + ": empty duration interval");
    }
}

const SnapActionSpec& snap_spec(const TemporalPlanningProblem& problem, SnapEventRef ev)
{
    const auto& a = problem.actions.at(ev.action);
    return ev.kind == SnapKind::Start ? a.start : a.end;
}

std::string event_name(const TemporalPlanningProblem& problem, SnapEventRef ev)
{
    const auto& name = problem.actions.at(ev.action).name;
    return (ev.kind == SnapKind::Start ? "start(" : "end(") + name + ")";
}

TimedSnapSequence plan_to_snap_sequence(const TemporalPlanningProblem& problem, const TimeTriggeredPlan& plan)
{
    const auto& entries = plan.entries;
    for (const auto& e : entries)
        if (e.action >= problem.actions.size())
            throw PlanError(PlanError::Kind::UnknownAction, "plan references an unknown action");

    for (std::size_t i = 0; i < entries.size(); ++i) {
        for (std::size_t j = 0; j < entries.size(); ++j) {
            if (i == j || entries[i].action != entries[j].action)
                continue;
            const auto& a = entries[i];
            const auto& b = entries[j];
            if (a.start <= b.start && b.start < a.start + a.duration)
                throw PlanError(PlanError::Kind::SelfOverlap,
                                "action '" + problem.actions[a.action].name + "' overlaps itself at time " +
                                    to_display_string(b.start));
        }
    }

    TimedSnapSequence seq;
    seq.reserve(2 * entries.size());
    for (const auto& e : entries) {
        seq.push_back({e.start, {e.action, SnapKind::Start}});
        seq.push_back({e.start + e.duration, {e.action, SnapKind::End}});
    }
    std::stable_sort(seq.begin(), seq.end(), [](const TimedSnap& a, const TimedSnap& b) { return a.time < b.time; });
    for (std::size_t i = 1; i < seq.size(); ++i)
        if (seq[i - 1].time == seq[i].time)
            throw PlanError(PlanError::Kind::SimultaneousEvents,
                            event_name(problem, seq[i - 1].event) + " and " + event_name(problem, seq[i].event) +
                                " both occur at time " + to_display_string(seq[i].time));
    return seq;
}

TruthAssignment apply_snap_action(const TemporalPlanningProblem& problem, const TruthAssignment& state,
                                  const SnapActionSpec& h)
{
    for (PropId p : h.pre)
        if (!state.at(p))
            throw Inapplicable(p, "precondition '" + problem.props.at(p) + "' is false");
    TruthAssignment next = state;
    for (PropId p : h.del)
        next.at(p) = false;
    for (PropId p : h.add)
        next.at(p) = true;
    return next;
}

std::optional<std::string> check_plan_valid(const TemporalPlanningProblem& problem, const TimeTriggeredPlan& plan)
{
    for (const auto& e : plan.entries) {
        if (e.action >= problem.actions.size())
            return "plan references an unknown action";
        const auto& a = problem.actions[e.action];
        if (e.start < 0)
            return "action '" + a.name + "' starts before time 0";
        if (e.duration <= 0)
            return "action '" + a.name + "' has a non-positive duration";
        if (e.duration < a.dur_lo || (a.dur_hi && e.duration > *a.dur_hi))
            return "duration " + to_display_string(e.duration) + " of '" + a.name + "' is outside its bounds";
    }

    TimedSnapSequence seq;
    try {
        seq = plan_to_snap_sequence(problem, plan);
    } catch (const PlanError& err) {
        return std::string{err.what()};
    }

    TruthAssignment state = problem.init;
    std::vector<bool> open(problem.actions.size(), false);
    for (const auto& ts : seq) {
        try {
            state = apply_snap_action(problem, state, snap_spec(problem, ts.event));
        } catch (const Inapplicable& err) {
            return event_name(problem, ts.event) + " at " + to_display_string(ts.time) + ": " + err.what();
        }
        open[ts.event.action] = ts.event.kind == SnapKind::Start;
        for (ActionId a = 0; a < open.size(); ++a) {
            if (!open[a])
                continue;
            for (PropId p : problem.actions[a].overall)
                if (!state[p])
                    return "over-all condition '" + problem.props[p] + "' of '" + problem.actions[a].name +
                           "' is false after " + event_name(problem, ts.event) + " at " + to_display_string(ts.time);
        }
    }
    for (PropId g : problem.goal)
        if (!state[g])
            return "goal '" + problem.props[g] + "' is not achieved";
    return std::nullopt;
}

// ---------------------------------------------------------------------------

std::string_view to_string(CmpOp op)
{
    switch (op) {
    case CmpOp::Le:
        return "<=";
    case CmpOp::Lt:
        return "<";
    case CmpOp::Eq:
        return "==";
    case CmpOp::Ge:
        return ">=";
    case CmpOp::Gt:
        return ">";
    }
    return "?";
}

std::optional<LocationId> TimedAutomaton::find_location(std::string_view name) const
{
    for (LocationId l = 0; l < locations.size(); ++l)
        if (locations[l] == name)
            return l;
    return std::nullopt;
}

std::optional<ClockId> TimedAutomaton::find_clock(std::string_view name) const
{
    for (ClockId c = 0; c < clocks.size(); ++c)
        if (clocks[c] == name)
            return c;
    return std::nullopt;
}

std::string TimedAutomaton::label_name(const TemporalPlanningProblem& problem, const Label& label) const
{
    if (label.is_snap())
        return event_name(problem, label.event);
    return label.internal;
}

namespace
{

void check_constraint(const TimedAutomaton& ta, const ClockConstraint& g, const std::string& where)
{
    for (const auto& a : g.atoms)
        if (a.x >= ta.clocks.size() || (a.y && *a.y >= ta.clocks.size()))
            throw ModelError(where + ": unknown clock");
}

} // namespace

void TimedAutomaton::check() const
{
    if (locations.empty())
        throw ModelError("automaton has no locations");
    if (initial >= locations.size())
        throw ModelError("initial location out of range");
    if (global_clock >= clocks.size())
        throw ModelError("global clock out of range");
    if (invariants.size() != locations.size())
        throw ModelError("invariant table does not match the location list");
    for (LocationId l = 0; l < locations.size(); ++l)
        check_constraint(*this, invariants[l], "invariant of " + locations[l]);
    for (const auto& t : transitions) {
        if (t.src >= locations.size() || t.dst >= locations.size())
            throw ModelError("transition endpoint out of range");
        check_constraint(*this, t.guard, "guard");
        for (ClockId c : t.resets) {
            if (c >= clocks.size())
                throw ModelError("reset of unknown clock");
            if (c == global_clock)
                throw ModelError("global clock '" + clocks[c] + "' is reset by a transition");
        }
    }
    Valuation zero(clocks.size(), Rational{0});
    if (!eval_clock_constraint(invariants[initial], zero))
        throw ModelError("initial invariant is false at the zero valuation");
}

bool eval_atom(const ClockAtom& a, const Valuation& u)
{
    if (a.x >= u.size() || (a.y && *a.y >= u.size()))
        throw ModelError("clock constraint refers to an unknown clock");
    Rational lhs = u[a.x];
    if (a.y)
        lhs -= u[*a.y];
    Rational n{a.n};
    switch (a.op) {
    case CmpOp::Le:
        return lhs <= n;
    case CmpOp::Lt:
        return lhs < n;
    case CmpOp::Eq:
        return lhs == n;
    case CmpOp::Ge:
        return lhs >= n;
    case CmpOp::Gt:
        return lhs > n;
    }
    return false;
}

bool eval_clock_constraint(const ClockConstraint& g, const Valuation& u)
{
    return std::all_of(g.atoms.begin(), g.atoms.end(), [&](const ClockAtom& a) { return eval_atom(a, u); });
}

Valuation delay_valuation(const Valuation& u, const Rational& d)
{
    if (d < 0)
        throw std::invalid_argument("delay must be non-negative");
    Valuation out = u;
    for (auto& v : out)
        v += d;
    return out;
}

Valuation apply_reset(const Valuation& u, const std::vector<ClockId>& resets)
{
    Valuation out = u;
    for (ClockId c : resets)
        out.at(c) = 0;
    return out;
}

bool is_applicable(const TimedAutomaton& ta, const TAState& state, SnapEventRef ev)
{
    for (const auto& t : ta.transitions) {
        if (t.src != state.location || !t.label.matches(ev))
            continue;
        if (!eval_clock_constraint(t.guard, state.valuation))
            continue;
        if (eval_clock_constraint(ta.invariants[t.dst], apply_reset(state.valuation, t.resets)))
            return true;
    }
    return false;
}

bool BadStateSpec::contains(const TAState& s) const
{
    return std::any_of(entries.begin(), entries.end(), [&](const BadEntry& e) {
        return e.location == s.location && eval_clock_constraint(e.guard, s.valuation);
    });
}

void PampProblem::check() const
{
    problem.check();
    platform.check();
    if (kappa < 1)
        throw ModelError("kappa must be at least 1");
    for (const auto& t : platform.transitions)
        if (t.label.is_snap() && t.label.event.action >= problem.actions.size())
            throw ModelError("transition label refers to an unknown action");
    for (const auto& b : bad.entries) {
        if (b.location >= platform.locations.size())
            throw ModelError("bad state refers to an unknown location");
        for (const auto& a : b.guard.atoms)
            if (a.x >= platform.clocks.size() || (a.y && *a.y >= platform.clocks.size()))
                throw ModelError("bad state guard refers to an unknown clock");
    }
}

} // namespace pamp
