#pragma once

#include "pamp/dbm.hpp"
#include "pamp/model.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace pamp
{

// ---------------------------------------------------------------------------
// Zones: canonical DBMs over {0} ∪ clocks, clock c stored at index c + 1.

struct Zone
{
    Dbm dbm;

    [[nodiscard]] bool empty() const { return dbm.empty(); }
    [[nodiscard]] std::size_t clock_count() const { return dbm.dim() - 1; }
    [[nodiscard]] bool contains(const Valuation& u) const;
    [[nodiscard]] bool includes(const Zone& o) const { return dbm.includes(o.dbm); }
    bool operator==(const Zone&) const = default;
};

Zone zone_origin(std::size_t clocks);
Zone zone_up(const Zone& z);
Zone zone_constrain(const Zone& z, const ClockConstraint& g);
Zone zone_constrain(const Zone& z, const ClockAtom& a);
Zone zone_reset(const Zone& z, const std::vector<ClockId>& resets);
/// Midpoint tie-break in clock order; throws std::logic_error on an empty zone.
Valuation zone_sample(const Zone& z);

/// Adds "pos - neg ~ n" to a DBM for each conjunct implied by the operator.
void constrain_difference(Dbm& d, std::size_t pos, std::size_t neg, CmpOp op, const Rational& n);

// ---------------------------------------------------------------------------
// Symbolic exploration of plan-compliant runs.
//
// Runs are sequences of states s_1 .. s_K: s_1 is the initial state, and
// each move s_j -> s_{j+1} fires one transition at the time of s_j (or
// stutters) and then lets time elapse. Snap-labelled transitions must fire
// the next plan event exactly at its timestamp; every other transition must
// be internal.

struct PathStep
{
    static constexpr std::size_t stutter = static_cast<std::size_t>(-1); // delay-only move

    std::size_t transition = 0;
    std::optional<std::size_t> matched_event; // index into the snap sequence
};

struct SymbolicRunNode
{
    LocationId location = 0;
    Zone zone;
    std::vector<PathStep> path;
    std::size_t fired = 0; // number of plan events already matched

    [[nodiscard]] std::size_t depth() const { return path.size(); }
};

struct ExploreStats
{
    std::size_t nodes = 0;
    std::size_t subsumed = 0;
};

/// Every node of the symbolic run tree compliant with the first `prefix_len`
/// events of rho, using at most `step_bound` moves. With subsumption enabled
/// nodes whose zone is covered by an earlier node at the same location and
/// progress are dropped (the covered states are still represented).
std::vector<SymbolicRunNode> enumerate_compliant_runs(const TimedAutomaton& ta, const TimedSnapSequence& rho,
                                                      std::size_t prefix_len, std::size_t step_bound,
                                                      bool subsumption = true);

/// Locations visited by runs that match every event of rho within the bound.
std::vector<LocationId> reachable_locations(const TimedAutomaton& ta, const TimedSnapSequence& rho,
                                            std::size_t step_bound);
/// Final locations of runs that match every event of rho within the bound.
std::vector<LocationId> reachable_after_locations(const TimedAutomaton& ta, const TimedSnapSequence& rho,
                                                  std::size_t step_bound);

// ---------------------------------------------------------------------------
// Witnesses

struct WitnessStep
{
    enum class Kind
    {
        Delay,
        Fire
    };

    Kind kind = Kind::Delay;
    Rational delay;                           // Delay only
    std::size_t transition = 0;               // Fire only
    std::optional<std::size_t> matched_event; // Fire of a snap label
    TAState after;
};

struct Witness
{
    enum class Obligation
    {
        Executability,
        Safety
    };

    Obligation obligation = Obligation::Executability;
    TAState initial;
    std::vector<WitnessStep> run;
    // Executability: index (0-based) into the snap sequence of the event that
    // is not applicable in the final state of the run.
    std::size_t event_index = 0;
    // Safety: the state after run[bad_step - 1] (the initial state when
    // bad_step == 0) is bad; the run then completes the plan.
    std::size_t bad_step = 0;
    std::size_t bad_entry = 0;

    [[nodiscard]] const TAState& state_at(std::size_t step) const { return step == 0 ? initial : run[step - 1].after; }
    [[nodiscard]] const TAState& final_state() const { return state_at(run.size()); }
};

/// Replays a witness with pointwise semantics and confirms the violation.
/// Returns a description of the first discrepancy, or nullopt if it replays.
std::optional<std::string> replay_witness(const TimedAutomaton& ta, const TimedSnapSequence& rho,
                                          const BadStateSpec& bad, const Witness& w);

std::string describe_witness(const TemporalPlanningProblem& problem, const TimedAutomaton& ta, const Witness& w);

// ---------------------------------------------------------------------------
// Checks

/// Trace-length bound used for a plan of |pi| snap events: kappa * max(1, |pi|)
/// states.
std::size_t trace_bound(int kappa, std::size_t plan_length);

/// The witness names the smallest event index at which some compliant run
/// reaches a state where that event is not applicable.
std::optional<Witness> check_executability(const TimedAutomaton& ta, const TimedSnapSequence& rho,
                                           std::size_t trace_states, ExploreStats* stats = nullptr);
std::optional<Witness> check_safety(const TimedAutomaton& ta, const TimedSnapSequence& rho, const BadStateSpec& bad,
                                    std::size_t trace_states, ExploreStats* stats = nullptr);

/// Throws PlanError on simultaneous events or self-overlap.
std::optional<Witness> check_executability(const PampProblem& p, const TimeTriggeredPlan& plan);
std::optional<Witness> check_safety(const PampProblem& p, const TimeTriggeredPlan& plan);

struct Verdict
{
    enum class Kind
    {
        Solution,
        InvalidPlan,
        NonExecutable,
        Unsafe
    };

    Kind kind = Kind::Solution;
    std::string message;
    std::optional<Witness> witness;

    [[nodiscard]] bool ok() const { return kind == Kind::Solution; }
};

std::string_view to_string(Verdict::Kind k);

/// Plan validity for the planning problem, then executability, then safety;
/// the first failure wins.
Verdict validate_plan(const PampProblem& p, const TimeTriggeredPlan& plan);

} // namespace pamp
