#pragma once

// Test-only helpers: seeded random instances and oracles that do not share
// code with the library routes they check.

#include "pamp/engine.hpp"
#include "pamp/model.hpp"

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace pamp::test
{

using Rng = std::mt19937_64;

struct RandomShape
{
    int max_actions = 3;   // snap actions: twice this
    int max_locations = 6;
    int max_clocks = 3;    // including the global clock
    int max_constant = 6;
    int min_kappa = 1;
    int max_kappa = 3;
    bool invariants = true;
    bool bad_guards = true;
    // Every location also gets an unguarded self-loop for every snap event;
    // without invariants every plan is then executable.
    bool total = false;
};

/// Planning layer, automaton and bad set drawn from `shape`. Every snap
/// event labels at least one transition; the global clock is clock 0 and is
/// never reset. Passes PampProblem::check().
PampProblem random_pamp(Rng& rng, const RandomShape& shape);

/// Random time-triggered plan over the problem's actions with integer times
/// and durations inside the bounds; events are pairwise distinct in time.
/// Plan-level validity against the planning problem is not attempted.
TimeTriggeredPlan random_plan(Rng& rng, const TemporalPlanningProblem& problem, int max_entries);

// ---------------------------------------------------------------------------
// Oracles

/// Difference constraint x_to - x_from <= / < value over variables 0..n-1.
struct DiffEdge
{
    std::size_t from = 0;
    std::size_t to = 0;
    Rational value;
    bool strict = false;
};

/// Bellman-Ford over (value, strictness) weights: consistent iff no cycle of
/// negative weight, or of zero weight with a strict edge.
bool bellman_ford_consistent(std::size_t n, const std::vector<DiffEdge>& edges);

/// Plan from (action name, start, duration) triples; a counter base name
/// resolves to its copies in order of appearance.
TimeTriggeredPlan named_plan(const TemporalPlanningProblem& problem,
                             const std::vector<std::tuple<std::string, Rational, Rational>>& entries);

/// Same with the running-example shorthands P, W and C for Process, Work
/// and Cooldown.
TimeTriggeredPlan factory_plan(const TemporalPlanningProblem& problem,
                               std::vector<std::tuple<std::string, Rational, Rational>> entries);

/// Canonical rational n / d.
Rational q(long n, long d = 1);

/// Exhaustive planning-level search: some ordering of at most `max_events`
/// snap events is logically valid (preconditions, delete-before-add
/// effects, over-all conditions after every event, goal, nothing left open,
/// no self-overlap) and its difference constraints (times non-negative and
/// strictly increasing, duration bounds) are consistent. Returns the first
/// such ordering in length-then-lexicographic order. Orderings with a
/// prefix accepted by `forbidden` are skipped.
using PrefixFilter = std::function<bool(const std::vector<SnapEventRef>&)>;
std::optional<std::vector<SnapEventRef>> brute_force_plan(const TemporalPlanningProblem& problem,
                                                          std::size_t max_events, const PrefixFilter& forbidden = {});

} // namespace pamp::test
