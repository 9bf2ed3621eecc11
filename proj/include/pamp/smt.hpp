#pragma once

#include "pamp/rational.hpp"

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace pamp::smt
{

// ---------------------------------------------------------------------------
// Terms: immutable DAG nodes over booleans and linear rational arithmetic.
// Free variables are existential; a Forall node binds universal ones.

enum class Sort
{
    Bool,
    Real
};

enum class Op
{
    BoolConst,
    RealConst,
    Var,
    Not,
    And,
    Or,
    Implies,
    Eq, // same-sorted operands; Bool Eq is iff
    Le,
    Lt,
    Add,
    Scale, // rational coefficient times one real operand
    Forall
};

struct Node;
using Term = std::shared_ptr<const Node>;

struct Node
{
    Op op;
    Sort sort;
    bool bval = false;
    Rational rval; // RealConst value or Scale coefficient
    std::string name;
    std::vector<Term> kids;
    std::vector<Term> bound; // Forall only
};

Term mk_true();
Term mk_false();
Term mk_bool(bool b);
Term mk_real(const Rational& q);
Term mk_var(const std::string& name, Sort sort);
Term bool_var(const std::string& name);
Term real_var(const std::string& name);

Term mk_not(const Term& a);
Term mk_and(std::vector<Term> kids);
Term mk_or(std::vector<Term> kids);
Term mk_and(const Term& a, const Term& b);
Term mk_or(const Term& a, const Term& b);
Term mk_implies(const Term& a, const Term& b);
Term mk_iff(const Term& a, const Term& b);
Term mk_eq(const Term& a, const Term& b);
Term mk_le(const Term& a, const Term& b);
Term mk_lt(const Term& a, const Term& b);
Term mk_ge(const Term& a, const Term& b);
Term mk_gt(const Term& a, const Term& b);
Term mk_add(std::vector<Term> kids);
Term mk_add(const Term& a, const Term& b);
Term mk_sub(const Term& a, const Term& b);
Term mk_scale(const Rational& k, const Term& a);
/// Exactly one of the given booleans holds.
Term mk_exactly_one(const std::vector<Term>& xs);
Term mk_at_most_one(const std::vector<Term>& xs);
Term mk_forall(std::vector<Term> vars, const Term& body);

bool is_true(const Term& t);
bool is_false(const Term& t);
std::optional<Rational> const_value(const Term& t);

/// Free variables (not bound by a Forall), sorted by name.
std::vector<Term> free_vars(const Term& t);

// ---------------------------------------------------------------------------
// Models and evaluation

using Value = std::variant<bool, Rational>;

class Model
{
public:
    void set(const std::string& name, Value v) { _values[name] = std::move(v); }
    [[nodiscard]] bool has(const std::string& name) const { return _values.count(name) != 0; }
    [[nodiscard]] const Value& get(const std::string& name) const;
    [[nodiscard]] bool get_bool(const std::string& name) const;
    [[nodiscard]] Rational get_real(const std::string& name) const;
    [[nodiscard]] const std::map<std::string, Value>& values() const { return _values; }

private:
    std::map<std::string, Value> _values;
};

class EvalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Exact evaluation of a quantifier-free term. Throws EvalError on a missing
/// variable or a quantifier.
Value evaluate(const Term& t, const Model& m);
bool evaluate_bool(const Term& t, const Model& m);

/// Replaces free variables by name; folds constants on the way up.
Term substitute(const Term& t, const std::unordered_map<std::string, Term>& map);
/// Substitutes every variable of the model with its value.
Term substitute_model(const Term& t, const Model& m);

std::size_t term_size(const Term& t);

// ---------------------------------------------------------------------------
// SMT-LIB

/// Renders a term as an SMT-LIB 2 expression.
std::string to_smtlib(const Term& t);

/// Full script: logic, declarations of free variables (sorted by name), the
/// assertion, check-sat and get-value over `query` (defaults to every free
/// variable).
std::string emit_smtlib(const Term& t, const std::vector<Term>* query = nullptr);

class ProtocolError : public std::runtime_error
{
public:
    ProtocolError(const std::string& what, std::string raw) : std::runtime_error(what), _raw(std::move(raw)) {}
    [[nodiscard]] const std::string& raw() const { return _raw; }

private:
    std::string _raw;
};

/// Parses a get-value response "((x 1.0) (b true) ...)". Accepts integer,
/// decimal, "(- v)" and "(/ p q)" forms. Throws ProtocolError.
Model parse_model(const std::string& text);

// ---------------------------------------------------------------------------
// Solving

enum class Strategy
{
    NativeQuantifier,
    Cegis,
    // A few CEGIS rounds, then the native quantifier engine on whatever they
    // leave open. Candidates that survive one counterexample round are common
    // in practice, while refutations need the native engine.
    Auto
};

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view s);

struct SolverConfig
{
    std::string command = "z3 -in";
    Strategy strategy = Strategy::Auto;
    bool fallback = true;  // Native -> Cegis when the solver answers unknown
    double timeout_seconds = 300.0; // per solver process
    int cegis_rounds = 200;
    int warmup_rounds = 4; // Auto only
};

struct Result
{
    enum class Status
    {
        Sat,
        Unsat,
        Unknown
    };

    Status status = Status::Unknown;
    Model model;
    std::string reason;
    std::size_t solver_calls = 0;

    [[nodiscard]] bool sat() const { return status == Status::Sat; }
    [[nodiscard]] bool unsat() const { return status == Status::Unsat; }
};

std::string_view to_string(Result::Status s);

/// One solver process on a quantifier-free or quantified term. `query` names
/// the variables whose values are requested on sat.
Result check(const Term& t, const std::vector<Term>& query, const SolverConfig& cfg);

/// exists(free vars of outer and body) . outer /\ forall universals . body
struct ExistsForall
{
    Term outer;
    std::vector<Term> universals;
    Term body;
    // Universals whose counterexample values are instantiated as constants
    // only (e.g. discrete selectors); all others may be generalized.
    std::vector<std::string> ground;

    [[nodiscard]] Term to_term() const;
};

/// Models cover the existential variables. Verdicts are checked: every Sat
/// model satisfies `outer` under exact evaluation.
Result solve(const ExistsForall& q, const SolverConfig& cfg);

/// Process runner used by check(); exposed for tests.
struct ProcessOutput
{
    bool timed_out = false;
    int exit_status = 0;
    std::string out;
    std::string err;
};

ProcessOutput run_process(const std::string& command, const std::string& input, double timeout_seconds);

} // namespace pamp::smt
