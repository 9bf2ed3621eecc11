#pragma once

#include "pamp/engine.hpp"
#include "pamp/formats.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pamp
{

// ---------------------------------------------------------------------------
// Automaton components, written with textual guards so that generators can
// emit documents directly. compose() forms the synchronous product: snap
// labels ("start(X)", "end(X)") in both alphabets synchronize, every other
// transition interleaves.

struct ComponentEdge
{
    std::string from;
    std::string to;
    std::string label;
    std::string guard = "true";
    std::vector<std::string> reset;
};

struct Component
{
    std::vector<std::string> locations;
    std::vector<std::string> invariants; // parallel to locations; "true" if none
    std::string initial;
    std::vector<ComponentEdge> edges;

    void add_location(std::string name, std::string invariant = "true");
};

/// Product locations are named "a.b".
Component compose(const Component& a, const Component& b);

// ---------------------------------------------------------------------------
// Generators

enum class Family
{
    Factory1,
    Factory2,
    Rover
};

std::string_view to_string(Family f);
std::optional<Family> parse_family(std::string_view s);

struct BenchSpec
{
    Family family = Family::Factory1;
    int works = 2;         // Factory
    int deadline = 50;     // Factory
    int locations = 3;     // Rover
    std::vector<int> comm; // Rover: indices of communication locations
    int kappa = 2;

    [[nodiscard]] std::string id() const;
};

inline int default_deadline(int works) { return 25 * works; }

/// Factory1 deadlines live in the automaton (a deadline guard into BAD);
/// Factory2 deadlines disable Work synchronization once passed.
ProblemBundle gen_factory(int variant, int works, int deadline, int kappa);
ProblemBundle gen_rover(int locations, const std::vector<int>& comm, int kappa);
ProblemBundle generate(const BenchSpec& spec);

/// Instance grid used by `pamp bench` and the qualitative comparison.
std::vector<BenchSpec> desk_suite();

// ---------------------------------------------------------------------------
// Results

struct RunRecord
{
    std::string instance;
    Family family = Family::Factory1;
    int kappa = 2;
    std::string mode;
    ReportVerdict verdict = ReportVerdict::Unknown;
    double wall_seconds = 0.0;
    std::size_t solver_calls = 0;
    std::size_t iterations = 0;
    std::size_t bound = 0; // h for enc, path length for ref

    [[nodiscard]] bool solved() const { return verdict == ReportVerdict::Solution; }
};

struct ResultTables
{
    std::string runs;     // one row per record
    std::string coverage; // family,kappa,mode,instances,solved
    std::string cactus;   // mode,rank,wall_seconds over solved runs, sorted
    std::string scatter;  // instance,enc_seconds,ref_seconds (timeouts as the limit)
};

/// Throws std::invalid_argument on an empty record set.
ResultTables emit_results(const std::vector<RunRecord>& records, double timeout_seconds);

/// Reads the `runs` table back.
ParseResult<std::vector<RunRecord>> parse_run_records(std::string_view csv);

/// Generates and solves one instance. An Unknown verdict whose wall time
/// reached the budget counts as a timeout (unsolved) like any other Unknown.
RunRecord run_instance(const BenchSpec& spec, const EngineConfig& cfg);

} // namespace pamp
