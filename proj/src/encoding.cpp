#include "pamp/encoding.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

namespace pamp::enc
{

using namespace smt;

namespace
{

std::string idx(std::string_view prefix, std::size_t a)
{
    return std::string(prefix) + "_" + std::to_string(a);
}

std::string idx(std::string_view prefix, std::size_t a, std::size_t b)
{
    return idx(prefix, a) + "_" + std::to_string(b);
}

std::vector<SnapEventRef> all_events(const TemporalPlanningProblem& problem)
{
    std::vector<SnapEventRef> out;
    for (ActionId a = 0; a < problem.actions.size(); ++a) {
        out.push_back({a, SnapKind::Start});
        out.push_back({a, SnapKind::End});
    }
    return out;
}

Term props_hold(const std::vector<PropId>& props, const std::vector<Term>& state)
{
    std::vector<Term> xs;
    for (PropId q : props)
        xs.push_back(state[q]);
    return mk_and(std::move(xs));
}

Term cmp(CmpOp op, const Term& lhs, const Term& rhs)
{
    switch (op) {
    case CmpOp::Le:
        return mk_le(lhs, rhs);
    case CmpOp::Lt:
        return mk_lt(lhs, rhs);
    case CmpOp::Eq:
        return mk_eq(lhs, rhs);
    case CmpOp::Ge:
        return mk_ge(lhs, rhs);
    case CmpOp::Gt:
        return mk_gt(lhs, rhs);
    }
    return mk_false();
}

std::vector<Term> reset_values(const Transition& t, const std::vector<Term>& clocks)
{
    std::vector<Term> r = clocks;
    for (ClockId c : t.resets)
        r[c] = mk_real(0);
    return r;
}

// Guard at the source values and target invariant after the resets.
Term enabled(const TimedAutomaton& ta, const Transition& t, const TraceVars& tr, std::size_t k)
{
    return mk_and({tr.loc[k][t.src], clock_constraint(t.guard, tr.clock[k]),
                   clock_constraint(ta.invariants[t.dst], reset_values(t, tr.clock[k]))});
}

} // namespace

Term PlanView::last_time() const { return steps == 0 ? mk_real(0) : time[steps - 1]; }

std::vector<Term> PlanVars::all() const
{
    std::vector<Term> out;
    for (std::size_t j = 0; j < view.steps; ++j) {
        out.push_back(view.time[j]);
        for (const auto* row : {&view.start[j], &view.end[j], &duration[j], &open[j], &state[j]})
            out.insert(out.end(), row->begin(), row->end());
    }
    return out;
}

PlanVars make_plan_vars(const TemporalPlanningProblem& problem, std::size_t h)
{
    PlanVars v;
    v.view.steps = h;
    for (std::size_t j = 0; j < h; ++j) {
        v.view.time.push_back(real_var(idx("t", j)));
        auto& st = v.view.start.emplace_back();
        auto& en = v.view.end.emplace_back();
        auto& d = v.duration.emplace_back();
        auto& op = v.open.emplace_back();
        for (ActionId a = 0; a < problem.actions.size(); ++a) {
            st.push_back(bool_var(idx("st", j, a)));
            en.push_back(bool_var(idx("en", j, a)));
            d.push_back(real_var(idx("d", j, a)));
            op.push_back(bool_var(idx("op", j, a)));
        }
        auto& s = v.state.emplace_back();
        for (PropId q = 0; q < problem.props.size(); ++q)
            s.push_back(bool_var(idx("s", j, q)));
    }
    return v;
}

Term encode_plan_valid(const TemporalPlanningProblem& problem, const PlanVars& v)
{
    const std::size_t h = v.view.steps;
    const std::size_t n_actions = problem.actions.size();
    std::vector<Term> init_state, no_open(n_actions, mk_false());
    for (PropId q = 0; q < problem.props.size(); ++q)
        init_state.push_back(mk_bool(problem.init[q]));

    std::vector<Term> cs;
    std::vector<Term> used(h);
    for (std::size_t j = 0; j < h; ++j) {
        std::vector<Term> flags;
        for (ActionId a = 0; a < n_actions; ++a) {
            flags.push_back(v.view.start[j][a]);
            flags.push_back(v.view.end[j][a]);
        }
        used[j] = mk_or(flags);
        cs.push_back(mk_at_most_one(flags));
    }

    // Used steps come first, strictly ordered in time; idle steps repeat the
    // last time. An empty plan sits at time 0.
    if (h > 0) {
        cs.push_back(mk_ge(v.view.time[0], mk_real(0)));
        cs.push_back(mk_implies(mk_not(used[0]), mk_eq(v.view.time[0], mk_real(0))));
    }
    for (std::size_t j = 1; j < h; ++j) {
        cs.push_back(mk_implies(mk_not(used[j - 1]), mk_not(used[j])));
        cs.push_back(mk_implies(used[j], mk_lt(v.view.time[j - 1], v.view.time[j])));
        cs.push_back(mk_implies(mk_not(used[j]), mk_eq(v.view.time[j - 1], v.view.time[j])));
    }

    for (std::size_t j = 0; j < h; ++j) {
        const auto& prev_state = j == 0 ? init_state : v.state[j - 1];
        const auto& prev_open = j == 0 ? no_open : v.open[j - 1];
        for (ActionId a = 0; a < n_actions; ++a) {
            const auto& act = problem.actions[a];
            const Term& st = v.view.start[j][a];
            const Term& en = v.view.end[j][a];
            const Term& d = v.duration[j][a];
            std::vector<Term> on_start{mk_not(prev_open[a]), props_hold(act.start.pre, prev_state),
                                       mk_ge(d, mk_real(act.dur_lo))};
            if (act.dur_hi)
                on_start.push_back(mk_le(d, mk_real(*act.dur_hi)));
            cs.push_back(mk_implies(st, mk_and(std::move(on_start))));

            // The matching start is the latest start of the same action.
            std::vector<Term> on_end{prev_open[a], props_hold(act.end.pre, prev_state)};
            for (std::size_t s = 0; s < j; ++s) {
                std::vector<Term> latest{v.view.start[s][a]};
                for (std::size_t m = s + 1; m < j; ++m)
                    latest.push_back(mk_not(v.view.start[m][a]));
                on_end.push_back(mk_implies(mk_and(std::move(latest)),
                                            mk_eq(mk_sub(v.view.time[j], v.view.time[s]), v.duration[s][a])));
            }
            cs.push_back(mk_implies(en, mk_and(std::move(on_end))));
            cs.push_back(mk_iff(v.open[j][a], mk_or(st, mk_and(prev_open[a], mk_not(en)))));
            cs.push_back(mk_implies(v.open[j][a], props_hold(act.overall, v.state[j])));
        }
        // Frame: delete then add, as in sequential application.
        for (PropId q = 0; q < problem.props.size(); ++q) {
            std::vector<Term> adds, dels;
            for (ActionId a = 0; a < n_actions; ++a) {
                const auto& act = problem.actions[a];
                auto has = [q](const std::vector<PropId>& xs) { return std::find(xs.begin(), xs.end(), q) != xs.end(); };
                if (has(act.start.add))
                    adds.push_back(v.view.start[j][a]);
                if (has(act.end.add))
                    adds.push_back(v.view.end[j][a]);
                if (has(act.start.del))
                    dels.push_back(v.view.start[j][a]);
                if (has(act.end.del))
                    dels.push_back(v.view.end[j][a]);
            }
            cs.push_back(mk_iff(v.state[j][q], mk_or(mk_or(std::move(adds)),
                                                     mk_and(prev_state[q], mk_not(mk_or(std::move(dels)))))));
        }
    }

    const auto& final_state = h == 0 ? init_state : v.state[h - 1];
    const auto& final_open = h == 0 ? no_open : v.open[h - 1];
    cs.push_back(props_hold(problem.goal, final_state));
    for (ActionId a = 0; a < n_actions; ++a)
        cs.push_back(mk_not(final_open[a]));
    return mk_and(std::move(cs));
}

PlanView fixed_view(const TemporalPlanningProblem& problem, const std::vector<SnapEventRef>& events,
                    const std::vector<Term>& times)
{
    PlanView v;
    v.steps = events.size();
    v.time = times;
    for (const auto& ev : events) {
        auto& st = v.start.emplace_back();
        auto& en = v.end.emplace_back();
        for (ActionId a = 0; a < problem.actions.size(); ++a) {
            st.push_back(mk_bool(ev == SnapEventRef{a, SnapKind::Start}));
            en.push_back(mk_bool(ev == SnapEventRef{a, SnapKind::End}));
        }
    }
    return v;
}

PlanView concrete_view(const TemporalPlanningProblem& problem, const TimedSnapSequence& rho)
{
    std::vector<SnapEventRef> events;
    std::vector<Term> times;
    for (const auto& s : rho) {
        events.push_back(s.event);
        times.push_back(mk_real(s.time));
    }
    return fixed_view(problem, events, times);
}

Term encode_stn_prefix(const TemporalPlanningProblem& problem, const std::vector<SnapEventRef>& events,
                       const std::vector<Term>& times, std::size_t prefix)
{
    std::vector<Term> cs;
    for (std::size_t j = 0; j < prefix; ++j) {
        cs.push_back(j == 0 ? mk_ge(times[0], mk_real(0)) : mk_lt(times[j - 1], times[j]));
        if (events[j].kind != SnapKind::End)
            continue;
        for (std::size_t s = j; s-- > 0;) {
            if (events[s] != SnapEventRef{events[j].action, SnapKind::Start})
                continue;
            const auto& act = problem.actions[events[j].action];
            Term gap = mk_sub(times[j], times[s]);
            cs.push_back(mk_ge(gap, mk_real(act.dur_lo)));
            if (act.dur_hi)
                cs.push_back(mk_le(gap, mk_real(*act.dur_hi)));
            break;
        }
    }
    return mk_and(std::move(cs));
}

// ---------------------------------------------------------------------------

std::vector<Term> TraceVars::all() const
{
    std::vector<Term> out;
    for (std::size_t k = 0; k < states; ++k) {
        out.insert(out.end(), loc[k].begin(), loc[k].end());
        out.insert(out.end(), clock[k].begin(), clock[k].end());
        if (k < choice.size())
            out.push_back(choice[k]);
    }
    return out;
}

TraceVars make_trace_vars(const TimedAutomaton& ta, std::size_t states,
                          const std::optional<std::vector<SnapEventRef>>& events)
{
    TraceVars tr;
    tr.states = states;
    tr.global_clock = ta.global_clock;
    for (std::size_t d = 0; d < ta.transitions.size(); ++d) {
        const auto& label = ta.transitions[d].label;
        if (!events || !label.is_snap() || std::find(events->begin(), events->end(), label.event) != events->end())
            tr.moves.push_back(d);
    }
    for (std::size_t k = 0; k < states; ++k) {
        auto& l = tr.loc.emplace_back();
        for (LocationId i = 0; i < ta.locations.size(); ++i)
            l.push_back(bool_var(idx("L", k, i)));
        auto& c = tr.clock.emplace_back();
        for (ClockId x = 0; x < ta.clocks.size(); ++x)
            c.push_back(real_var(idx("C", k, x)));
        if (k + 1 < states)
            tr.choice.push_back(real_var(idx("ch", k)));
    }
    return tr;
}

Labels::Labels(const TimedAutomaton& ta, const TraceVars& tr) : _ta(ta), _tr(tr) {}

Term Labels::label(std::size_t k, SnapEventRef ev)
{
    if (k >= _tr.choice.size())
        return mk_false();
    auto key = std::make_pair(k, ev);
    if (auto it = _cache.find(key); it != _cache.end())
        return it->second;
    std::vector<Term> xs;
    for (std::size_t d : _tr.moves)
        if (_ta.transitions[d].label.matches(ev))
            xs.push_back(mk_eq(_tr.choice[k], mk_real(Rational(static_cast<long>(d)))));
    return _cache[key] = mk_or(std::move(xs));
}

Term clock_atom(const ClockAtom& a, const std::vector<Term>& clocks)
{
    Term lhs = a.y ? mk_sub(clocks[a.x], clocks[*a.y]) : clocks[a.x];
    return cmp(a.op, lhs, mk_real(Rational(static_cast<long>(a.n))));
}

Term clock_constraint(const ClockConstraint& g, const std::vector<Term>& clocks)
{
    std::vector<Term> xs;
    for (const auto& a : g.atoms)
        xs.push_back(clock_atom(a, clocks));
    return mk_and(std::move(xs));
}

Term encode_trace_valid(const TimedAutomaton& ta, const TraceVars& tr)
{
    std::vector<Term> cs;
    const std::size_t stutter = ta.transitions.size();
    for (LocationId l = 0; l < ta.locations.size(); ++l)
        cs.push_back(l == ta.initial ? tr.loc[0][l] : mk_not(tr.loc[0][l]));
    for (ClockId x = 0; x < ta.clocks.size(); ++x)
        cs.push_back(mk_eq(tr.clock[0][x], mk_real(0)));
    for (std::size_t k = 0; k < tr.states; ++k) {
        cs.push_back(mk_exactly_one(tr.loc[k]));
        for (LocationId l = 0; l < ta.locations.size(); ++l)
            if (!ta.invariants[l].is_true())
                cs.push_back(mk_implies(tr.loc[k][l], clock_constraint(ta.invariants[l], tr.clock[k])));
    }
    for (std::size_t k = 0; k + 1 < tr.states; ++k) {
        const Term& ch = tr.choice[k];
        Term delay = mk_sub(tr.gamma(k + 1), tr.gamma(k));
        cs.push_back(mk_ge(delay, mk_real(0)));
        std::vector<Term> domain{mk_eq(ch, mk_real(Rational(static_cast<long>(stutter))))};
        for (std::size_t d : tr.moves)
            domain.push_back(mk_eq(ch, mk_real(Rational(static_cast<long>(d)))));
        cs.push_back(mk_or(std::move(domain)));

        for (std::size_t d : tr.moves) {
            const auto& t = ta.transitions[d];
            auto r = reset_values(t, tr.clock[k]);
            std::vector<Term> move{enabled(ta, t, tr, k), tr.loc[k + 1][t.dst]};
            for (ClockId x = 0; x < ta.clocks.size(); ++x)
                if (x != ta.global_clock)
                    move.push_back(mk_eq(tr.clock[k + 1][x], mk_add(r[x], delay)));
            cs.push_back(mk_implies(mk_eq(ch, mk_real(Rational(static_cast<long>(d)))), mk_and(std::move(move))));
        }
        std::vector<Term> stay;
        for (LocationId l = 0; l < ta.locations.size(); ++l)
            stay.push_back(mk_iff(tr.loc[k][l], tr.loc[k + 1][l]));
        for (ClockId x = 0; x < ta.clocks.size(); ++x)
            if (x != ta.global_clock)
                stay.push_back(mk_eq(tr.clock[k + 1][x], mk_add(tr.clock[k][x], delay)));
        cs.push_back(mk_implies(mk_eq(ch, mk_real(Rational(static_cast<long>(stutter)))), mk_and(std::move(stay))));
    }
    return mk_and(std::move(cs));
}

Term encode_justified(const TemporalPlanningProblem& problem, const PlanView& plan, const TraceVars& tr, Labels& lab,
                      std::size_t upto)
{
    std::vector<Term> cs;
    for (const auto& ev : all_events(problem))
        for (std::size_t k = 0; k + 1 < tr.states; ++k) {
            Term fired = lab.label(k, ev);
            if (is_false(fired))
                continue;
            std::vector<Term> why;
            for (std::size_t j = 0; j < upto; ++j)
                why.push_back(mk_and(plan.flag(j, ev), mk_eq(plan.time[j], tr.gamma(k))));
            cs.push_back(mk_implies(fired, mk_or(std::move(why))));
        }
    return mk_and(std::move(cs));
}

Term encode_fired(const TemporalPlanningProblem& problem, const PlanView& plan, const TraceVars& tr, Labels& lab,
                  std::size_t step)
{
    std::vector<Term> cs;
    for (const auto& ev : all_events(problem)) {
        Term flag = plan.flag(step, ev);
        if (is_false(flag))
            continue;
        std::vector<Term> at;
        for (std::size_t k = 0; k + 1 < tr.states; ++k)
            at.push_back(mk_and(lab.label(k, ev), mk_eq(tr.gamma(k), plan.time[step])));
        std::vector<Term> once{mk_or(at)};
        for (std::size_t k = 0; k < at.size(); ++k)
            for (std::size_t m = k + 1; m < at.size(); ++m)
                once.push_back(mk_not(mk_and(at[k], at[m])));
        cs.push_back(mk_implies(flag, mk_and(std::move(once))));
    }
    return mk_and(std::move(cs));
}

Term encode_compliant(const TemporalPlanningProblem& problem, const PlanView& plan, const TraceVars& tr, Labels& lab,
                      std::size_t i)
{
    std::vector<Term> cs{encode_justified(problem, plan, tr, lab, plan.steps)};
    for (std::size_t j = 0; j < i; ++j)
        cs.push_back(encode_fired(problem, plan, tr, lab, j));
    return mk_and(std::move(cs));
}

Term encode_applicable(const TimedAutomaton& ta, const TemporalPlanningProblem& problem, const PlanView& plan,
                       const TraceVars& tr, Labels& lab, std::size_t step)
{
    std::vector<Term> cs;
    const Term& t = plan.time[step];
    for (const auto& ev : all_events(problem)) {
        Term flag = plan.flag(step, ev);
        if (is_false(flag))
            continue;
        std::vector<Term> per_state;
        std::vector<Term> not_yet;
        for (std::size_t k = 0; k < tr.states; ++k) {
            std::vector<Term> ways;
            for (const auto& d : ta.transitions)
                if (d.label.matches(ev))
                    ways.push_back(enabled(ta, d, tr, k));
            std::vector<Term> premise{mk_eq(tr.gamma(k), t)};
            premise.insert(premise.end(), not_yet.begin(), not_yet.end());
            per_state.push_back(mk_implies(mk_and(std::move(premise)), mk_or(std::move(ways))));
            not_yet.push_back(mk_or(mk_lt(tr.gamma(k), t), mk_not(lab.label(k, ev))));
        }
        cs.push_back(mk_implies(flag, mk_and(std::move(per_state))));
    }
    return mk_and(std::move(cs));
}

Term bad_at(const BadStateSpec& bad, const TraceVars& tr, std::size_t k)
{
    std::vector<Term> xs;
    for (const auto& e : bad.entries)
        xs.push_back(mk_and(tr.loc[k][e.location], clock_constraint(e.guard, tr.clock[k])));
    return mk_or(std::move(xs));
}

Term encode_safety(const TimedAutomaton&, const BadStateSpec& bad, const PlanView& plan, const TraceVars& tr)
{
    std::vector<Term> cs;
    Term horizon = plan.last_time();
    for (std::size_t k = 0; k < tr.states; ++k)
        cs.push_back(mk_implies(mk_le(tr.gamma(k), horizon), mk_not(bad_at(bad, tr, k))));
    return mk_and(std::move(cs));
}

Term encode_body(const PampProblem& p, const PlanView& plan, const TraceVars& tr)
{
    Labels lab(p.platform, tr);
    // Nested so that step j's obligation sits under the firing of steps < j.
    Term nested = encode_safety(p.platform, p.bad, plan, tr);
    for (std::size_t j = plan.steps; j-- > 0;)
        nested = mk_and(encode_applicable(p.platform, p.problem, plan, tr, lab, j),
                        mk_implies(encode_fired(p.problem, plan, tr, lab, j), nested));
    Term premise = mk_and(encode_trace_valid(p.platform, tr), encode_justified(p.problem, plan, tr, lab, plan.steps));
    return mk_implies(premise, nested);
}

namespace
{

std::vector<std::string> choice_names(const TraceVars& tr)
{
    std::vector<std::string> out;
    for (const auto& c : tr.choice)
        out.push_back(c->name);
    return out;
}

} // namespace

Phi build_phi(const PampProblem& p, std::size_t h)
{
    Phi phi{{}, make_plan_vars(p.problem, h), make_trace_vars(p.platform, trace_bound(p.kappa, h))};
    phi.query.outer = encode_plan_valid(p.problem, phi.plan);
    phi.query.universals = phi.trace.all();
    phi.query.body = encode_body(p, phi.plan.view, phi.trace);
    phi.query.ground = choice_names(phi.trace);
    return phi;
}

CheckPhi build_check_phi(const PampProblem& p, const std::vector<SnapEventRef>& events, std::size_t prefix)
{
    std::vector<SnapEventRef> head(events.begin(), events.begin() + static_cast<std::ptrdiff_t>(prefix));
    CheckPhi c{{}, {}, make_trace_vars(p.platform, trace_bound(p.kappa, prefix), head)};
    for (std::size_t j = 0; j < prefix; ++j)
        c.times.push_back(real_var(idx("x", j)));
    PlanView view = fixed_view(p.problem, head, c.times);
    c.query.outer = encode_stn_prefix(p.problem, head, c.times, prefix);
    c.query.universals = c.trace.all();
    c.query.body = encode_body(p, view, c.trace);
    c.query.ground = choice_names(c.trace);
    return c;
}

// ---------------------------------------------------------------------------

PlanQueries plan_queries(const PampProblem& p, const TimedSnapSequence& rho)
{
    std::vector<SnapEventRef> events;
    for (const auto& s : rho)
        events.push_back(s.event);
    PlanQueries out{{}, make_trace_vars(p.platform, trace_bound(p.kappa, rho.size()), events)};
    PlanView view = concrete_view(p.problem, rho);
    Labels lab(p.platform, out.trace);
    std::vector<Term> premise{encode_trace_valid(p.platform, out.trace),
                              encode_justified(p.problem, view, out.trace, lab, view.steps)};
    for (std::size_t j = 0; j < rho.size(); ++j) {
        Term app = encode_applicable(p.platform, p.problem, view, out.trace, lab, j);
        out.queries.push_back({PlanQuery::Kind::Applicability, j, mk_and(mk_and(premise), mk_not(app))});
        premise.push_back(encode_fired(p.problem, view, out.trace, lab, j));
    }
    Term safe = encode_safety(p.platform, p.bad, view, out.trace);
    out.queries.push_back({PlanQuery::Kind::Safety, rho.size(), mk_and(mk_and(premise), mk_not(safe))});
    return out;
}

Witness trace_witness(const TimedAutomaton& ta, const TraceVars& tr, const Model& m, std::size_t cut)
{
    auto state_of = [&](std::size_t k) {
        TAState s;
        for (LocationId l = 0; l < ta.locations.size(); ++l)
            if (m.get_bool(tr.loc[k][l]->name))
                s.location = l;
        for (ClockId x = 0; x < ta.clocks.size(); ++x)
            s.valuation.push_back(m.get_real(tr.clock[k][x]->name));
        return s;
    };
    Witness w;
    w.initial = state_of(0);
    TAState cur = w.initial;
    std::size_t fired = 0;
    for (std::size_t k = 0; k < cut; ++k) {
        Rational ch = m.get_real(tr.choice[k]->name);
        WitnessStep first;
        if (ch < static_cast<long>(ta.transitions.size())) {
            std::size_t d = static_cast<std::size_t>(ch.get_num().get_ui());
            const auto& t = ta.transitions[d];
            first.kind = WitnessStep::Kind::Fire;
            first.transition = d;
            if (t.label.is_snap())
                first.matched_event = fired++;
            cur.location = t.dst;
            cur.valuation = apply_reset(cur.valuation, t.resets);
        } else {
            first.kind = WitnessStep::Kind::Delay;
            first.delay = 0;
        }
        first.after = cur;
        w.run.push_back(first);
        WitnessStep wait;
        wait.kind = WitnessStep::Kind::Delay;
        wait.delay = m.get_real(tr.gamma(k + 1)->name) - m.get_real(tr.gamma(k)->name);
        cur.valuation = delay_valuation(cur.valuation, wait.delay);
        wait.after = cur;
        w.run.push_back(wait);
    }
    return w;
}

SmtVerdict check_plan_smt(const PampProblem& p, const TimedSnapSequence& rho, const SolverConfig& cfg)
{
    SmtVerdict v;
    PlanQueries qs = plan_queries(p, rho);
    const auto& tr = qs.trace;
    for (const auto& q : qs.queries) {
        Result r = check(q.formula, tr.all(), cfg);
        v.solver_calls += r.solver_calls;
        if (r.unsat())
            continue;
        if (!r.sat()) {
            v.kind = SmtVerdict::Kind::Unknown;
            v.reason = r.reason;
            return v;
        }
        Witness full = trace_witness(p.platform, tr, r.model, tr.states - 1);
        if (q.kind == PlanQuery::Kind::Applicability) {
            // First state at the event time where the event has not fired
            // and is not applicable.
            const TimedSnap& e = rho[q.event];
            std::size_t fired = 0;
            for (std::size_t k = 0; k < tr.states; ++k) {
                if (k > 0 && full.run[2 * k - 2].matched_event)
                    ++fired;
                const TAState& s = full.state_at(2 * k);
                if (fired != q.event || s.valuation[p.platform.global_clock] != e.time ||
                    is_applicable(p.platform, s, e.event))
                    continue;
                Witness w = full;
                w.run.resize(2 * k);
                w.obligation = Witness::Obligation::Executability;
                w.event_index = q.event;
                v.kind = SmtVerdict::Kind::NonExecutable;
                v.event = q.event;
                v.witness = w;
                return v;
            }
            v.kind = SmtVerdict::Kind::Unknown;
            v.reason = "violating trace has no inapplicable state";
            return v;
        }
        Rational horizon = rho.empty() ? Rational{0} : rho.back().time;
        for (std::size_t k = 0; k < tr.states; ++k) {
            const TAState& s = full.state_at(2 * k);
            if (s.valuation[p.platform.global_clock] > horizon)
                continue;
            for (std::size_t b = 0; b < p.bad.entries.size(); ++b) {
                const auto& entry = p.bad.entries[b];
                if (entry.location != s.location || !eval_clock_constraint(entry.guard, s.valuation))
                    continue;
                full.obligation = Witness::Obligation::Safety;
                full.bad_step = 2 * k;
                full.bad_entry = b;
                v.kind = SmtVerdict::Kind::Unsafe;
                v.witness = full;
                return v;
            }
        }
        v.kind = SmtVerdict::Kind::Unknown;
        v.reason = "violating trace has no bad state";
        return v;
    }
    return v;
}

void dump_phi(const PampProblem& p, std::size_t h, const std::string& dir)
{
    std::filesystem::create_directories(dir);
    Phi phi = build_phi(p, h);
    Labels lab(p.platform, phi.trace);
    const PlanView& view = phi.plan.view;
    std::vector<std::pair<std::string, Term>> parts{
        {"plan_valid", phi.query.outer},
        {"trace_valid", encode_trace_valid(p.platform, phi.trace)},
        {"justified", encode_justified(p.problem, view, phi.trace, lab, view.steps)},
        {"safety", encode_safety(p.platform, p.bad, view, phi.trace)},
        {"phi", phi.query.to_term()},
    };
    for (std::size_t j = 0; j < h; ++j) {
        parts.emplace_back(idx("fired", j), encode_fired(p.problem, view, phi.trace, lab, j));
        parts.emplace_back(idx("applicable", j), encode_applicable(p.platform, p.problem, view, phi.trace, lab, j));
    }
    for (const auto& [name, t] : parts) {
        std::ofstream os(std::filesystem::path(dir) / (name + ".smt2"));
        os << emit_smtlib(t);
    }
}

} // namespace pamp::enc
