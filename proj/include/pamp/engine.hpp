#pragma once

#include "pamp/encoding.hpp"
#include "pamp/formats.hpp"
#include "pamp/planner.hpp"
#include "pamp/smt.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pamp
{

enum class Mode
{
    Enc,
    Ref
};

std::string_view to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view s);

struct EngineConfig
{
    Mode mode = Mode::Ref;
    std::optional<int> kappa;      // overrides the bundle's value
    std::size_t max_h = 16;        // Enc
    std::size_t max_path_len = 16; // Ref
    smt::SolverConfig solver;
    SearchStrategy search = SearchStrategy::IterativeDeepening;
    std::size_t node_budget = 5'000'000;
    double time_budget_seconds = 0; // whole run; 0: unlimited
};

struct SolveResult
{
    enum class Verdict
    {
        Solution,
        NoSolutionWithinBounds,
        Unknown
    };

    Verdict verdict = Verdict::Unknown;
    std::optional<TimeTriggeredPlan> plan;
    std::string reason;
    SolveStatistics stats;
    std::vector<std::vector<SnapEventRef>> learned; // Ref, in learning order
};

std::string_view to_string(SolveResult::Verdict v);

SolveResult pamp_enc(const PampProblem& p, const EngineConfig& cfg);
SolveResult pamp_ref(const PampProblem& p, const EngineConfig& cfg);
SolveResult solve(const PampProblem& p, const EngineConfig& cfg);

struct CheckOutcome
{
    enum class Status
    {
        Pass,
        Fail,
        Unknown
    };

    Status status = Status::Unknown;
    TimeTriggeredPlan plan;            // Pass
    std::vector<SnapEventRef> prefix;  // Fail: shortest failing prefix
    std::string reason;                // Unknown
    std::size_t solver_calls = 0;
};

/// Fails with the shortest prefix whose query is unsatisfiable; the full
/// ordering passing yields a schedule.
CheckOutcome check(const PampProblem& p, const StnPlan& candidate, const smt::SolverConfig& cfg);

/// Throws std::logic_error when selected steps share a time (an encoding
/// fault).
TimeTriggeredPlan extract_plan(const TemporalPlanningProblem& problem, const smt::Model& m, const enc::PlanVars& v);
TimeTriggeredPlan extract_plan(const smt::Model& m, const std::vector<SnapEventRef>& events,
                               const std::vector<smt::Term>& times);

/// Lower bound on the snap events of any solution plan, from a plan search
/// ignoring the platform; nullopt when that search gives up. Returns
/// max_len + 1 when no planning-level plan of length <= max_len exists.
std::optional<std::size_t> min_plan_length(const TemporalPlanningProblem& problem, std::size_t max_len,
                                           std::size_t node_budget);

} // namespace pamp
