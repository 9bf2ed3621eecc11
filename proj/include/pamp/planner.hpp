#pragma once

#include "pamp/dbm.hpp"
#include "pamp/model.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pamp
{

// ---------------------------------------------------------------------------
// Simple temporal network over an ordered event list. DBM variable 0 is the
// origin, variable i + 1 the time of event i.

class Stn
{
public:
    Stn() = default;

    [[nodiscard]] std::size_t size() const { return _events.size(); }
    [[nodiscard]] const std::vector<SnapEventRef>& events() const { return _events; }
    [[nodiscard]] const Dbm& dbm() const { return _dbm; }

    /// Adds x_i - x_j <= / < bound, with i, j event indices (nullopt: the
    /// origin). Nullopt when the network becomes inconsistent; *this is left
    /// unchanged either way. Throws std::out_of_range on an unknown event.
    [[nodiscard]] std::optional<Stn> with_constraint(std::optional<std::size_t> i, std::optional<std::size_t> j,
                                                     const Bound& b) const;

    /// Appends an event after the current last one (strictly later, not
    /// before 0), linking an end to its start with the duration bounds.
    [[nodiscard]] std::optional<Stn> append(const TemporalPlanningProblem& problem, SnapEventRef ev,
                                            std::optional<std::size_t> start_index) const;

    /// One consistent assignment of event times.
    [[nodiscard]] std::vector<Rational> schedule() const;

private:
    Dbm _dbm{1};
    std::vector<SnapEventRef> _events;
};

struct OpenAction
{
    ActionId action = 0;
    std::size_t start_index = 0;

    bool operator==(const OpenAction&) const = default;
};

struct SearchNode
{
    TruthAssignment state;
    std::vector<OpenAction> open; // ordered by action id
    Stn stn;

    [[nodiscard]] const std::vector<SnapEventRef>& path() const { return stn.events(); }
    [[nodiscard]] bool is_goal(const TemporalPlanningProblem& problem) const;
};

SearchNode initial_node(const TemporalPlanningProblem& problem);

/// Children in action order: the end of an open action or the start of a
/// closed one, when its preconditions hold, no open action's over-all
/// condition is falsified and the network stays consistent.
std::vector<SearchNode> successors(const SearchNode& node, const TemporalPlanningProblem& problem);

// ---------------------------------------------------------------------------

class PrefixTrie
{
public:
    PrefixTrie();

    /// Returns false if the sequence was already forbidden.
    bool insert(const std::vector<SnapEventRef>& prefix);
    /// Some stored prefix is a prefix of `path`.
    [[nodiscard]] bool forbids(const std::vector<SnapEventRef>& path) const;
    [[nodiscard]] std::size_t size() const { return _size; }

    /// Walks one event from trie node `at`: -1 when `at` is already off the
    /// trie or has no child for `ev`; -2 when the child is a stored prefix.
    [[nodiscard]] long step(long at, SnapEventRef ev) const;
    static constexpr long root = 0;
    static constexpr long off = -1;
    static constexpr long forbidden = -2;

private:
    struct Node
    {
        std::map<SnapEventRef, std::size_t> kids;
        bool terminal = false;
    };

    std::vector<Node> _nodes;
    std::size_t _size = 0;
};

enum class SearchStrategy
{
    IterativeDeepening,
    Greedy
};

std::string_view to_string(SearchStrategy s);
std::optional<SearchStrategy> parse_search_strategy(std::string_view s);

struct PlannerConfig
{
    SearchStrategy strategy = SearchStrategy::IterativeDeepening;
    std::size_t max_path_len = 16;
    std::size_t node_budget = 5'000'000;
    std::size_t min_path_len = 0; // iterative deepening starts here
};

struct StnPlan
{
    Stn stn;

    [[nodiscard]] const std::vector<SnapEventRef>& events() const { return stn.events(); }
};

struct PlanOutcome
{
    enum class Status
    {
        Found,
        Exhausted,      // no plan up to max_path_len avoiding the trie
        BudgetExceeded
    };

    Status status = Status::Exhausted;
    std::optional<StnPlan> plan;
    std::size_t expanded = 0;
};

PlanOutcome plan(const TemporalPlanningProblem& problem, const PrefixTrie& bad_prefixes, const PlannerConfig& cfg);

/// The fixed event ordering of an STN plan.
std::vector<SnapEventRef> path(const StnPlan& p);

/// Builds a time-triggered plan from an event ordering and its times.
/// Throws std::logic_error when an end has no open start.
TimeTriggeredPlan plan_from_schedule(const std::vector<SnapEventRef>& events, const std::vector<Rational>& times);

} // namespace pamp
