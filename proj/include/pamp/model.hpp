#pragma once

#include "pamp/rational.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pamp
{

using PropId = std::size_t;
using ActionId = std::size_t;
using ClockId = std::size_t;
using LocationId = std::size_t;

class ModelError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Planning layer

struct SnapActionSpec
{
    std::vector<PropId> pre;
    std::vector<PropId> add;
    std::vector<PropId> del;
};

struct DurativeAction
{
    std::string name;
    SnapActionSpec start;
    SnapActionSpec end;
    std::vector<PropId> overall;
    Rational dur_lo;
    std::optional<Rational> dur_hi; // nullopt: unbounded
    // Counter-compiled copies share a base name ("Work" for "Work#2").
    std::string base_name;
};

struct TemporalPlanningProblem
{
    std::vector<std::string> props;
    std::vector<DurativeAction> actions;
    std::vector<bool> init;
    std::vector<PropId> goal;

    [[nodiscard]] std::optional<PropId> find_prop(std::string_view name) const;
    [[nodiscard]] std::optional<ActionId> find_action(std::string_view name) const;

    /// Throws ModelError on dangling ids, overlapping add/del sets, bad bounds
    /// or duplicate names.
    void check() const;
};

enum class SnapKind
{
    Start,
    End
};

struct SnapEventRef
{
    ActionId action = 0;
    SnapKind kind = SnapKind::Start;

    auto operator<=>(const SnapEventRef&) const = default;
};

[[nodiscard]] const SnapActionSpec& snap_spec(const TemporalPlanningProblem& problem, SnapEventRef ev);
[[nodiscard]] std::string event_name(const TemporalPlanningProblem& problem, SnapEventRef ev);

struct PlanEntry
{
    ActionId action = 0;
    Rational start;
    Rational duration;

    bool operator==(const PlanEntry&) const = default;
};

struct TimeTriggeredPlan
{
    std::vector<PlanEntry> entries;

    [[nodiscard]] std::size_t length() const { return 2 * entries.size(); }
    bool operator==(const TimeTriggeredPlan&) const = default;
};

struct TimedSnap
{
    Rational time;
    SnapEventRef event;

    bool operator==(const TimedSnap&) const = default;
};

using TimedSnapSequence = std::vector<TimedSnap>;

class PlanError : public std::runtime_error
{
public:
    enum class Kind
    {
        SimultaneousEvents,
        SelfOverlap,
        UnknownAction,
    };

    PlanError(Kind kind, const std::string& what) : std::runtime_error(what), _kind(kind) {}
    [[nodiscard]] Kind kind() const { return _kind; }

private:
    Kind _kind;
};

class Inapplicable : public std::runtime_error
{
public:
    Inapplicable(PropId prop, const std::string& what) : std::runtime_error(what), _prop(prop) {}
    [[nodiscard]] PropId prop() const { return _prop; }

private:
    PropId _prop;
};

using TruthAssignment = std::vector<bool>;

/// Orders the 2n snap events of a plan by time. Throws PlanError when two
/// events coincide or an action overlaps itself; duration bounds and start
/// times are checked by check_plan_valid.
TimedSnapSequence plan_to_snap_sequence(const TemporalPlanningProblem& problem, const TimeTriggeredPlan& plan);

/// Throws Inapplicable naming the first false precondition.
TruthAssignment apply_snap_action(const TemporalPlanningProblem& problem, const TruthAssignment& state,
                                  const SnapActionSpec& h);

/// Plan-level validity for the planning problem alone: ordering, durations,
/// preconditions, over-all conditions after every event, goal at the end.
/// Returns a human-readable failure, or nullopt when the plan solves it.
std::optional<std::string> check_plan_valid(const TemporalPlanningProblem& problem, const TimeTriggeredPlan& plan);

// ---------------------------------------------------------------------------
// Platform layer

enum class CmpOp
{
    Le,
    Lt,
    Eq,
    Ge,
    Gt
};

std::string_view to_string(CmpOp op);

// x ~ n or x - y ~ n.
struct ClockAtom
{
    ClockId x = 0;
    std::optional<ClockId> y;
    CmpOp op = CmpOp::Le;
    std::int64_t n = 0;

    bool operator==(const ClockAtom&) const = default;
};

struct ClockConstraint
{
    std::vector<ClockAtom> atoms;

    [[nodiscard]] bool is_true() const { return atoms.empty(); }
    bool operator==(const ClockConstraint&) const = default;
};

struct Label
{
    enum class Kind
    {
        Internal,
        Snap
    };

    Kind kind = Kind::Internal;
    SnapEventRef event;   // Snap only
    std::string internal; // Internal only, e.g. "tau"

    [[nodiscard]] bool is_snap() const { return kind == Kind::Snap; }
    [[nodiscard]] bool matches(SnapEventRef ev) const { return is_snap() && event == ev; }

    static Label snap(SnapEventRef ev) { return Label{Kind::Snap, ev, {}}; }
    static Label tau(std::string name = "tau") { return Label{Kind::Internal, {}, std::move(name)}; }
};

struct Transition
{
    LocationId src = 0;
    ClockConstraint guard;
    Label label;
    std::vector<ClockId> resets;
    LocationId dst = 0;
};

struct TimedAutomaton
{
    std::vector<std::string> locations;
    LocationId initial = 0;
    std::vector<std::string> clocks;
    ClockId global_clock = 0;
    std::vector<Transition> transitions;
    std::vector<ClockConstraint> invariants; // one per location

    [[nodiscard]] std::optional<LocationId> find_location(std::string_view name) const;
    [[nodiscard]] std::optional<ClockId> find_clock(std::string_view name) const;
    [[nodiscard]] std::string label_name(const TemporalPlanningProblem& problem, const Label& label) const;

    /// Throws ModelError when the global clock is reset, ids dangle or the
    /// initial invariant rejects the zero valuation.
    void check() const;
};

using Valuation = std::vector<Rational>;

struct TAState
{
    LocationId location = 0;
    Valuation valuation;

    bool operator==(const TAState&) const = default;
};

bool eval_clock_constraint(const ClockConstraint& g, const Valuation& u);
bool eval_atom(const ClockAtom& a, const Valuation& u);
Valuation delay_valuation(const Valuation& u, const Rational& d);
Valuation apply_reset(const Valuation& u, const std::vector<ClockId>& resets);

/// Snap event applicability in a concrete state: some transition with the
/// matching label has a true guard and the reset valuation satisfies the
/// target invariant.
bool is_applicable(const TimedAutomaton& ta, const TAState& state, SnapEventRef ev);

struct BadEntry
{
    LocationId location = 0;
    ClockConstraint guard;
};

struct BadStateSpec
{
    std::vector<BadEntry> entries;

    [[nodiscard]] bool contains(const TAState& s) const;
};

struct PampProblem
{
    TemporalPlanningProblem problem;
    TimedAutomaton platform;
    BadStateSpec bad;
    int kappa = 2;

    /// Cross-checks the layers: kappa >= 1, every snap event has a label
    /// symbol, bad locations exist.
    void check() const;
};

} // namespace pamp
