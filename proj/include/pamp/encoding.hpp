#pragma once

#include "pamp/model.hpp"
#include "pamp/smt.hpp"
#include "pamp/ta_exec.hpp"

#include <map>
#include <string>
#include <vector>

namespace pamp::enc
{

using smt::Term;

// ---------------------------------------------------------------------------
// Plan side. A PlanView exposes, per plan step j (0-based), whether each
// action starts or ends there and the step time. The same formulas are built
// over free variables (bounded search), fixed events with symbolic times
// (prefix checks) or a concrete plan (validation queries).

struct PlanView
{
    std::size_t steps = 0;
    std::vector<std::vector<Term>> start; // [step][action]
    std::vector<std::vector<Term>> end;   // [step][action]
    std::vector<Term> time;

    [[nodiscard]] Term flag(std::size_t step, SnapEventRef ev) const
    {
        return ev.kind == SnapKind::Start ? start[step][ev.action] : end[step][ev.action];
    }
    /// Time of the last step; 0 for the empty plan.
    [[nodiscard]] Term last_time() const;
};

struct PlanVars
{
    PlanView view;
    std::vector<std::vector<Term>> duration; // [step][action]
    std::vector<std::vector<Term>> state;    // [step][prop], after the step
    std::vector<std::vector<Term>> open;     // [step][action], after the step

    /// Every existential variable, in a deterministic order.
    [[nodiscard]] std::vector<Term> all() const;
};

PlanVars make_plan_vars(const TemporalPlanningProblem& problem, std::size_t h);

/// Bounded temporal planning: at most one snap event per step, used steps
/// strictly increasing in time and followed only by idle steps of equal time,
/// start/end bookkeeping without self-overlap, duration bounds tied to the
/// matching end, frame axioms, over-all conditions after every step, goal and
/// no open action at the last step.
Term encode_plan_valid(const TemporalPlanningProblem& problem, const PlanVars& v);

/// Events fixed to `events`, times symbolic (x_1 .. x_n).
PlanView fixed_view(const TemporalPlanningProblem& problem, const std::vector<SnapEventRef>& events,
                    const std::vector<Term>& times);
PlanView concrete_view(const TemporalPlanningProblem& problem, const TimedSnapSequence& rho);

/// Constraints of the first `prefix` events of an ordered event list: first
/// time non-negative, strictly increasing times, and duration bounds between
/// each end and its start when both are inside the prefix.
Term encode_stn_prefix(const TemporalPlanningProblem& problem, const std::vector<SnapEventRef>& events,
                       const std::vector<Term>& times, std::size_t prefix);

// ---------------------------------------------------------------------------
// Trace side: states 1 .. K (0-based here), one-hot locations, clock values,
// and per move a choice variable naming the transition taken (or the
// stutter value, transitions.size()).

struct TraceVars
{
    std::size_t states = 0;
    std::vector<std::vector<Term>> loc;   // [k][location]
    std::vector<std::vector<Term>> clock; // [k][clock]
    std::vector<Term> choice;             // [k], k < states - 1
    ClockId global_clock = 0;
    // Transitions a move may take. When the plan's events are known, those
    // labelled with other snap events are left out: justification rules them
    // out anyway.
    std::vector<std::size_t> moves;

    [[nodiscard]] const Term& gamma(std::size_t k) const { return clock[k][global_clock]; }
    /// Universally quantified variables.
    [[nodiscard]] std::vector<Term> all() const;
};

/// `events`: the snap events the plan may use; nullopt keeps every
/// transition.
TraceVars make_trace_vars(const TimedAutomaton& ta, std::size_t states,
                          const std::optional<std::vector<SnapEventRef>>& events = std::nullopt);

/// Caches label terms: label(k, e) holds iff the move from state k fires a
/// transition labelled e. False at the last state.
class Labels
{
public:
    Labels(const TimedAutomaton& ta, const TraceVars& tr);
    Term label(std::size_t k, SnapEventRef ev);

private:
    const TimedAutomaton& _ta;
    const TraceVars& _tr;
    std::map<std::pair<std::size_t, SnapEventRef>, Term> _cache;
};

Term encode_trace_valid(const TimedAutomaton& ta, const TraceVars& tr);

Term clock_atom(const ClockAtom& a, const std::vector<Term>& clocks);
Term clock_constraint(const ClockConstraint& g, const std::vector<Term>& clocks);

/// Every snap label fired by the trace is explained by a plan event at the
/// same time (plan steps below `upto`).
Term encode_justified(const TemporalPlanningProblem& problem, const PlanView& plan, const TraceVars& tr, Labels& lab,
                      std::size_t upto);
/// The events of plan step `step` fire exactly once at their time.
Term encode_fired(const TemporalPlanningProblem& problem, const PlanView& plan, const TraceVars& tr, Labels& lab,
                  std::size_t step);
/// Justification plus firing of steps 0 .. i-1.
Term encode_compliant(const TemporalPlanningProblem& problem, const PlanView& plan, const TraceVars& tr, Labels& lab,
                      std::size_t i);
/// The events of plan step `step` are enabled at every trace state at their
/// time where they have not fired yet.
Term encode_applicable(const TimedAutomaton& ta, const TemporalPlanningProblem& problem, const PlanView& plan,
                       const TraceVars& tr, Labels& lab, std::size_t step);
/// States up to the plan's last time are not bad.
Term encode_safety(const TimedAutomaton& ta, const BadStateSpec& bad, const PlanView& plan, const TraceVars& tr);
Term bad_at(const BadStateSpec& bad, const TraceVars& tr, std::size_t k);

/// The universal body: TraceValid /\ justified implies the nested
/// applicability obligations and, once every step fired, safety.
Term encode_body(const PampProblem& p, const PlanView& plan, const TraceVars& tr);

struct Phi
{
    smt::ExistsForall query;
    PlanVars plan;
    TraceVars trace;
};

Phi build_phi(const PampProblem& p, std::size_t h);

struct CheckPhi
{
    smt::ExistsForall query;
    std::vector<Term> times;
    TraceVars trace;
};

/// The per-prefix query: events fixed, times under the prefix STN, trace
/// length kappa * max(1, prefix).
CheckPhi build_check_phi(const PampProblem& p, const std::vector<SnapEventRef>& events, std::size_t prefix);

// ---------------------------------------------------------------------------
// Concrete plans: the body with the plan substituted is checked by
// searching for a violating trace in quantifier-free queries.

struct PlanQuery
{
    enum class Kind
    {
        Applicability, // of event `event`
        Safety
    };

    Kind kind = Kind::Applicability;
    std::size_t event = 0;
    Term formula; // satisfiable iff the obligation is violated
};

struct PlanQueries
{
    std::vector<PlanQuery> queries;
    TraceVars trace;
};

PlanQueries plan_queries(const PampProblem& p, const TimedSnapSequence& rho);

struct SmtVerdict
{
    enum class Kind
    {
        Ok,
        NonExecutable,
        Unsafe,
        Unknown
    };

    Kind kind = Kind::Ok;
    std::size_t event = 0;
    std::optional<Witness> witness;
    std::string reason;
    std::size_t solver_calls = 0;
};

/// Executability then safety via the solver; violating trace models are
/// turned into witnesses.
SmtVerdict check_plan_smt(const PampProblem& p, const TimedSnapSequence& rho, const smt::SolverConfig& cfg);

/// Reads a trace model back as a run; `cut` is the last state kept.
Witness trace_witness(const TimedAutomaton& ta, const TraceVars& tr, const smt::Model& m, std::size_t cut);

/// Writes one SMT-LIB script per named sub-formula of Phi_h into `dir`.
void dump_phi(const PampProblem& p, std::size_t h, const std::string& dir);

} // namespace pamp::enc
