#pragma once

#include "pamp/model.hpp"
#include "pamp/ta_exec.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pamp
{

// On-disk artifacts are JSON documents. Diagnostics name the offending node
// with a JSON pointer ("/platform/transitions/3/guard").

struct SourceDiagnostic
{
    enum class Severity
    {
        Error,
        Warning
    };

    std::string path;
    std::string message;
    Severity severity = Severity::Error;

    bool operator==(const SourceDiagnostic&) const = default;
};

std::string format_diagnostic(const SourceDiagnostic& d);

template <class T>
struct ParseResult
{
    std::optional<T> value;
    std::vector<SourceDiagnostic> diagnostics;

    [[nodiscard]] bool ok() const { return value.has_value(); }
};

class FormatError : public std::runtime_error
{
public:
    explicit FormatError(std::vector<SourceDiagnostic> diags);
    [[nodiscard]] const std::vector<SourceDiagnostic>& diagnostics() const { return _diags; }

private:
    std::vector<SourceDiagnostic> _diags;
};

struct ProblemBundle
{
    PampProblem model;
    std::string name;
    std::string description;
};

// Bundles may declare bounded counters ("counters": [{"name": "steps",
// "max": 3}]) and let an action's end snap increment one. Parsing compiles
// each counter into propositions "steps=0" .. "steps=max" and each
// incrementing action into copies "Work#1" .. "Work#max" that advance the
// counter in order; transitions labelled with the base action are copied
// per copy. Serialization emits the compiled form, which parses back to the
// same model.

ParseResult<ProblemBundle> parse_problem_bundle(std::string_view text);
std::string serialize_problem_bundle(const ProblemBundle& bundle);
/// Throws FormatError when the bundle has error diagnostics.
ProblemBundle load_problem_bundle(std::string_view text);

/// "c >= 10 && x - y < 3"; "true" or "" is the empty conjunction.
ParseResult<ClockConstraint> parse_clock_constraint(std::string_view text, const std::vector<std::string>& clocks);
std::string format_clock_constraint(const ClockConstraint& g, const std::vector<std::string>& clocks);

// ---------------------------------------------------------------------------
// Plans and reports

struct SolveStatistics
{
    std::string mode;
    std::size_t solver_calls = 0;
    std::size_t iterations = 0;
    std::size_t learned_prefixes = 0;
    std::size_t horizon = 0;
    double wall_seconds = 0.0;
};

/// Entries may name an action exactly or by the base name of its counter
/// copies; base-name entries are assigned to copies in order of start time.
ParseResult<TimeTriggeredPlan> parse_plan(std::string_view text, const TemporalPlanningProblem& problem);
std::string serialize_plan(const TemporalPlanningProblem& problem, const TimeTriggeredPlan& plan,
                           const SolveStatistics* stats = nullptr);

enum class ReportVerdict
{
    Solution,
    NoSolutionWithinBound,
    Unsafe,
    NonExecutable,
    InvalidPlan,
    Unknown
};

std::string_view to_string(ReportVerdict v);
std::optional<ReportVerdict> parse_report_verdict(std::string_view s);

struct Report
{
    ReportVerdict verdict = ReportVerdict::Unknown;
    std::string message;
    std::optional<TimeTriggeredPlan> plan;
    std::optional<Witness> witness;
    SolveStatistics stats;
};

std::string serialize_report(const PampProblem& model, const Report& report);

/// Human-readable rendering of a serialized report.
ParseResult<std::string> render_report(std::string_view text);

} // namespace pamp
