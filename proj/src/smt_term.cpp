#include "pamp/smt.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_set>

namespace pamp::smt
{

namespace
{

Term make(Node n) { return std::make_shared<const Node>(std::move(n)); }

const Term& true_term()
{
    static const Term t = make(Node{Op::BoolConst, Sort::Bool, true, {}, {}, {}, {}});
    return t;
}

const Term& false_term()
{
    static const Term t = make(Node{Op::BoolConst, Sort::Bool, false, {}, {}, {}, {}});
    return t;
}

void require(bool cond, const char* what)
{
    if (!cond)
        throw std::invalid_argument(what);
}

} // namespace

Term mk_true() { return true_term(); }
Term mk_false() { return false_term(); }
Term mk_bool(bool b) { return b ? true_term() : false_term(); }

Term mk_real(const Rational& q)
{
    Rational v = q;
    v.canonicalize();
    return make(Node{Op::RealConst, Sort::Real, false, v, {}, {}, {}});
}

Term mk_var(const std::string& name, Sort sort) { return make(Node{Op::Var, sort, false, {}, name, {}, {}}); }
Term bool_var(const std::string& name) { return mk_var(name, Sort::Bool); }
Term real_var(const std::string& name) { return mk_var(name, Sort::Real); }

bool is_true(const Term& t) { return t->op == Op::BoolConst && t->bval; }
bool is_false(const Term& t) { return t->op == Op::BoolConst && !t->bval; }

std::optional<Rational> const_value(const Term& t)
{
    if (t->op == Op::RealConst)
        return t->rval;
    return std::nullopt;
}

Term mk_not(const Term& a)
{
    require(a->sort == Sort::Bool, "not expects a boolean");
    if (a->op == Op::BoolConst)
        return mk_bool(!a->bval);
    if (a->op == Op::Not)
        return a->kids[0];
    return make(Node{Op::Not, Sort::Bool, false, {}, {}, {a}, {}});
}

Term mk_and(std::vector<Term> kids)
{
    std::vector<Term> flat;
    for (auto& k : kids) {
        require(k->sort == Sort::Bool, "and expects booleans");
        if (is_true(k))
            continue;
        if (is_false(k))
            return mk_false();
        if (k->op == Op::And)
            flat.insert(flat.end(), k->kids.begin(), k->kids.end());
        else
            flat.push_back(std::move(k));
    }
    if (flat.empty())
        return mk_true();
    if (flat.size() == 1)
        return flat[0];
    return make(Node{Op::And, Sort::Bool, false, {}, {}, std::move(flat), {}});
}

Term mk_or(std::vector<Term> kids)
{
    std::vector<Term> flat;
    for (auto& k : kids) {
        require(k->sort == Sort::Bool, "or expects booleans");
        if (is_false(k))
            continue;
        if (is_true(k))
            return mk_true();
        if (k->op == Op::Or)
            flat.insert(flat.end(), k->kids.begin(), k->kids.end());
        else
            flat.push_back(std::move(k));
    }
    if (flat.empty())
        return mk_false();
    if (flat.size() == 1)
        return flat[0];
    return make(Node{Op::Or, Sort::Bool, false, {}, {}, std::move(flat), {}});
}

Term mk_and(const Term& a, const Term& b) { return mk_and(std::vector<Term>{a, b}); }
Term mk_or(const Term& a, const Term& b) { return mk_or(std::vector<Term>{a, b}); }

Term mk_implies(const Term& a, const Term& b)
{
    require(a->sort == Sort::Bool && b->sort == Sort::Bool, "implies expects booleans");
    if (is_false(a) || is_true(b))
        return mk_true();
    if (is_true(a))
        return b;
    if (is_false(b))
        return mk_not(a);
    return make(Node{Op::Implies, Sort::Bool, false, {}, {}, {a, b}, {}});
}

Term mk_iff(const Term& a, const Term& b)
{
    require(a->sort == Sort::Bool && b->sort == Sort::Bool, "iff expects booleans");
    if (a->op == Op::BoolConst)
        return a->bval ? b : mk_not(b);
    if (b->op == Op::BoolConst)
        return b->bval ? a : mk_not(a);
    if (a == b)
        return mk_true();
    return make(Node{Op::Eq, Sort::Bool, false, {}, {}, {a, b}, {}});
}

namespace
{

// Folds comparisons between constants and between a term and itself.
std::optional<bool> fold_cmp(Op op, const Term& a, const Term& b)
{
    auto ca = const_value(a);
    auto cb = const_value(b);
    if (ca && cb) {
        switch (op) {
        case Op::Eq:
            return *ca == *cb;
        case Op::Le:
            return *ca <= *cb;
        case Op::Lt:
            return *ca < *cb;
        default:
            break;
        }
    }
    if (a == b)
        return op != Op::Lt;
    return std::nullopt;
}

Term mk_cmp(Op op, const Term& a, const Term& b)
{
    require(a->sort == Sort::Real && b->sort == Sort::Real, "comparison expects reals");
    if (auto f = fold_cmp(op, a, b))
        return mk_bool(*f);
    return make(Node{op, Sort::Bool, false, {}, {}, {a, b}, {}});
}

} // namespace

Term mk_eq(const Term& a, const Term& b)
{
    if (a->sort == Sort::Bool)
        return mk_iff(a, b);
    return mk_cmp(Op::Eq, a, b);
}

Term mk_le(const Term& a, const Term& b) { return mk_cmp(Op::Le, a, b); }
Term mk_lt(const Term& a, const Term& b) { return mk_cmp(Op::Lt, a, b); }
Term mk_ge(const Term& a, const Term& b) { return mk_cmp(Op::Le, b, a); }
Term mk_gt(const Term& a, const Term& b) { return mk_cmp(Op::Lt, b, a); }

Term mk_add(std::vector<Term> kids)
{
    std::vector<Term> flat;
    Rational sum = 0;
    bool has_const = false;
    for (auto& k : kids) {
        require(k->sort == Sort::Real, "add expects reals");
        if (auto c = const_value(k)) {
            sum += *c;
            has_const = true;
        } else if (k->op == Op::Add) {
            for (const auto& g : k->kids) {
                if (auto gc = const_value(g)) {
                    sum += *gc;
                    has_const = true;
                } else {
                    flat.push_back(g);
                }
            }
        } else {
            flat.push_back(std::move(k));
        }
    }
    if (flat.empty())
        return mk_real(sum);
    if (has_const && sum != 0)
        flat.push_back(mk_real(sum));
    if (flat.size() == 1)
        return flat[0];
    return make(Node{Op::Add, Sort::Real, false, {}, {}, std::move(flat), {}});
}

Term mk_add(const Term& a, const Term& b) { return mk_add(std::vector<Term>{a, b}); }

Term mk_scale(const Rational& k, const Term& a)
{
    require(a->sort == Sort::Real, "scale expects a real");
    if (k == 0)
        return mk_real(0);
    if (k == 1)
        return a;
    if (auto c = const_value(a))
        return mk_real(k * *c);
    if (a->op == Op::Scale)
        return mk_scale(k * a->rval, a->kids[0]);
    Rational kk = k;
    kk.canonicalize();
    return make(Node{Op::Scale, Sort::Real, false, kk, {}, {a}, {}});
}

Term mk_sub(const Term& a, const Term& b)
{
    if (a == b)
        return mk_real(0);
    return mk_add(a, mk_scale(-1, b));
}

Term mk_at_most_one(const std::vector<Term>& xs)
{
    std::vector<Term> out;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j)
            out.push_back(mk_not(mk_and(xs[i], xs[j])));
    return mk_and(std::move(out));
}

Term mk_exactly_one(const std::vector<Term>& xs) { return mk_and(mk_or(xs), mk_at_most_one(xs)); }

Term mk_forall(std::vector<Term> vars, const Term& body)
{
    require(body->sort == Sort::Bool, "forall body must be boolean");
    for (const auto& v : vars)
        require(v->op == Op::Var, "forall binds variables");
    if (vars.empty() || body->op == Op::BoolConst)
        return body;
    return make(Node{Op::Forall, Sort::Bool, false, {}, {}, {body}, std::move(vars)});
}

// ---------------------------------------------------------------------------

std::vector<Term> free_vars(const Term& t)
{
    std::map<std::string, Term> found;
    // One visited set per binding context keeps the walk linear on DAGs.
    std::function<void(const Term&, const std::set<std::string>&, std::unordered_set<const Node*>&)> walk =
        [&](const Term& n, const std::set<std::string>& bound, std::unordered_set<const Node*>& seen) {
            if (!seen.insert(n.get()).second)
                return;
            if (n->op == Op::Var) {
                if (!bound.count(n->name))
                    found.emplace(n->name, n);
                return;
            }
            if (n->op == Op::Forall) {
                std::set<std::string> inner = bound;
                for (const auto& v : n->bound)
                    inner.insert(v->name);
                std::unordered_set<const Node*> inner_seen;
                walk(n->kids[0], inner, inner_seen);
                return;
            }
            for (const auto& k : n->kids)
                walk(k, bound, seen);
        };
    std::unordered_set<const Node*> seen;
    walk(t, {}, seen);
    std::vector<Term> out;
    for (auto& [name, v] : found)
        out.push_back(v);
    return out;
}

const Value& Model::get(const std::string& name) const
{
    auto it = _values.find(name);
    if (it == _values.end())
        throw EvalError("model has no value for '" + name + "'");
    return it->second;
}

bool Model::get_bool(const std::string& name) const
{
    const auto& v = get(name);
    if (!std::holds_alternative<bool>(v))
        throw EvalError("'" + name + "' is not boolean");
    return std::get<bool>(v);
}

Rational Model::get_real(const std::string& name) const
{
    const auto& v = get(name);
    if (!std::holds_alternative<Rational>(v))
        throw EvalError("'" + name + "' is not real");
    return std::get<Rational>(v);
}

namespace
{

struct Evaluator
{
    const Model& m;
    std::unordered_map<const Node*, Value> memo;

    Value eval(const Term& t)
    {
        if (auto it = memo.find(t.get()); it != memo.end())
            return it->second;
        Value v = compute(t);
        memo.emplace(t.get(), v);
        return v;
    }

    bool b(const Term& t) { return std::get<bool>(eval(t)); }
    Rational r(const Term& t) { return std::get<Rational>(eval(t)); }

    Value compute(const Term& t)
    {
        switch (t->op) {
        case Op::BoolConst:
            return t->bval;
        case Op::RealConst:
            return t->rval;
        case Op::Var: {
            const Value& v = m.get(t->name);
            if ((t->sort == Sort::Bool) != std::holds_alternative<bool>(v))
                throw EvalError("sort mismatch for '" + t->name + "'");
            return v;
        }
        case Op::Not:
            return !b(t->kids[0]);
        case Op::And:
            for (const auto& k : t->kids)
                if (!b(k))
                    return false;
            return true;
        case Op::Or:
            for (const auto& k : t->kids)
                if (b(k))
                    return true;
            return false;
        case Op::Implies:
            return !b(t->kids[0]) || b(t->kids[1]);
        case Op::Eq:
            if (t->kids[0]->sort == Sort::Bool)
                return b(t->kids[0]) == b(t->kids[1]);
            return r(t->kids[0]) == r(t->kids[1]);
        case Op::Le:
            return r(t->kids[0]) <= r(t->kids[1]);
        case Op::Lt:
            return r(t->kids[0]) < r(t->kids[1]);
        case Op::Add: {
            Rational s = 0;
            for (const auto& k : t->kids)
                s += r(k);
            return s;
        }
        case Op::Scale:
            return Rational{t->rval * r(t->kids[0])};
        case Op::Forall:
            throw EvalError("cannot evaluate a quantified term");
        }
        throw EvalError("unknown operator");
    }
};

struct Substituter
{
    const std::unordered_map<std::string, Term>& map;
    std::unordered_map<const Node*, Term> memo;

    Term go(const Term& t)
    {
        if (auto it = memo.find(t.get()); it != memo.end())
            return it->second;
        Term out = rebuild(t);
        memo.emplace(t.get(), out);
        return out;
    }

    Term rebuild(const Term& t)
    {
        switch (t->op) {
        case Op::BoolConst:
        case Op::RealConst:
            return t;
        case Op::Var: {
            auto it = map.find(t->name);
            if (it == map.end())
                return t;
            if (it->second->sort != t->sort)
                throw std::invalid_argument("substitution changes the sort of '" + t->name + "'");
            return it->second;
        }
        case Op::Forall: {
            std::unordered_map<std::string, Term> inner = map;
            for (const auto& v : t->bound)
                inner.erase(v->name);
            Substituter sub{inner, {}};
            return mk_forall(t->bound, sub.go(t->kids[0]));
        }
        default:
            break;
        }
        std::vector<Term> kids;
        kids.reserve(t->kids.size());
        bool changed = false;
        for (const auto& k : t->kids) {
            kids.push_back(go(k));
            changed = changed || kids.back() != k;
        }
        if (!changed)
            return t;
        switch (t->op) {
        case Op::Not:
            return mk_not(kids[0]);
        case Op::And:
            return mk_and(std::move(kids));
        case Op::Or:
            return mk_or(std::move(kids));
        case Op::Implies:
            return mk_implies(kids[0], kids[1]);
        case Op::Eq:
            return mk_eq(kids[0], kids[1]);
        case Op::Le:
            return mk_le(kids[0], kids[1]);
        case Op::Lt:
            return mk_lt(kids[0], kids[1]);
        case Op::Add:
            return mk_add(std::move(kids));
        case Op::Scale:
            return mk_scale(t->rval, kids[0]);
        default:
            throw std::logic_error("unexpected operator in substitution");
        }
    }
};

} // namespace

Value evaluate(const Term& t, const Model& m)
{
    Evaluator e{m, {}};
    return e.eval(t);
}

bool evaluate_bool(const Term& t, const Model& m)
{
    Value v = evaluate(t, m);
    if (!std::holds_alternative<bool>(v))
        throw EvalError("term is not boolean");
    return std::get<bool>(v);
}

Term substitute(const Term& t, const std::unordered_map<std::string, Term>& map)
{
    Substituter s{map, {}};
    return s.go(t);
}

Term substitute_model(const Term& t, const Model& m)
{
    std::unordered_map<std::string, Term> map;
    for (const auto& [name, v] : m.values())
        map.emplace(name, std::holds_alternative<bool>(v) ? mk_bool(std::get<bool>(v)) : mk_real(std::get<Rational>(v)));
    return substitute(t, map);
}

std::size_t term_size(const Term& t)
{
    std::unordered_set<const Node*> seen;
    std::vector<const Node*> stack{t.get()};
    while (!stack.empty()) {
        const Node* n = stack.back();
        stack.pop_back();
        if (!seen.insert(n).second)
            continue;
        for (const auto& k : n->kids)
            stack.push_back(k.get());
    }
    return seen.size();
}

// ---------------------------------------------------------------------------
// SMT-LIB rendering

namespace
{

std::string real_literal(const Rational& q)
{
    auto pos = [](const mpz_class& z) { return z.get_str() + ".0"; };
    mpz_class num = q.get_num();
    const mpz_class& den = q.get_den();
    bool neg = num < 0;
    if (neg)
        num = -num;
    std::string body = den == 1 ? pos(num) : "(/ " + pos(num) + " " + pos(den) + ")";
    return neg ? "(- " + body + ")" : body;
}

std::string sort_name(Sort s) { return s == Sort::Bool ? "Bool" : "Real"; }

void render(const Term& t, std::string& out)
{
    auto nary = [&](const char* op) {
        out += "(";
        out += op;
        for (const auto& k : t->kids) {
            out += " ";
            render(k, out);
        }
        out += ")";
    };
    switch (t->op) {
    case Op::BoolConst:
        out += t->bval ? "true" : "false";
        return;
    case Op::RealConst:
        out += real_literal(t->rval);
        return;
    case Op::Var:
        out += t->name;
        return;
    case Op::Not:
        return nary("not");
    case Op::And:
        return nary("and");
    case Op::Or:
        return nary("or");
    case Op::Implies:
        return nary("=>");
    case Op::Eq:
        return nary("=");
    case Op::Le:
        return nary("<=");
    case Op::Lt:
        return nary("<");
    case Op::Add:
        return nary("+");
    case Op::Scale:
        out += "(* " + real_literal(t->rval) + " ";
        render(t->kids[0], out);
        out += ")";
        return;
    case Op::Forall:
        out += "(forall (";
        for (std::size_t i = 0; i < t->bound.size(); ++i) {
            if (i)
                out += " ";
            out += "(" + t->bound[i]->name + " " + sort_name(t->bound[i]->sort) + ")";
        }
        out += ") ";
        render(t->kids[0], out);
        out += ")";
        return;
    }
}

bool has_quantifier(const Term& t)
{
    std::unordered_set<const Node*> seen;
    std::vector<const Node*> stack{t.get()};
    while (!stack.empty()) {
        const Node* n = stack.back();
        stack.pop_back();
        if (n->op == Op::Forall)
            return true;
        if (!seen.insert(n).second)
            continue;
        for (const auto& k : n->kids)
            stack.push_back(k.get());
    }
    return false;
}

} // namespace

std::string to_smtlib(const Term& t)
{
    std::string out;
    render(t, out);
    return out;
}

std::string emit_smtlib(const Term& t, const std::vector<Term>* query)
{
    std::string out;
    out += has_quantifier(t) ? "(set-logic LRA)\n" : "(set-logic QF_LRA)\n";
    out += "(set-option :produce-models true)\n";
    auto vars = free_vars(t);
    for (const auto& v : vars)
        out += "(declare-fun " + v->name + " () " + sort_name(v->sort) + ")\n";
    out += "(assert ";
    render(t, out);
    out += ")\n(check-sat)\n";
    const auto& q = query ? *query : vars;
    // Requested variables the formula does not mention still need a sort.
    std::set<std::string> declared;
    for (const auto& v : vars)
        declared.insert(v->name);
    std::string extra;
    for (const auto& v : q)
        if (!declared.count(v->name)) {
            extra += "(declare-fun " + v->name + " () " + sort_name(v->sort) + ")\n";
            declared.insert(v->name);
        }
    if (!extra.empty())
        out.insert(out.find("(assert "), extra);
    if (!q.empty()) {
        out += "(get-value (";
        for (std::size_t i = 0; i < q.size(); ++i)
            out += (i ? " " : "") + q[i]->name;
        out += "))\n";
    }
    out += "(exit)\n";
    return out;
}

// ---------------------------------------------------------------------------
// Model parsing

namespace
{

struct SExpr
{
    std::string atom;
    std::vector<SExpr> list;
    bool is_atom = true;
};

class SExprParser
{
public:
    explicit SExprParser(const std::string& s) : _s(s) {}

    SExpr parse()
    {
        skip();
        if (_i >= _s.size())
            fail("unexpected end of input");
        if (_s[_i] == '(') {
            ++_i;
            SExpr e;
            e.is_atom = false;
            for (;;) {
                skip();
                if (_i >= _s.size())
                    fail("unbalanced parentheses");
                if (_s[_i] == ')') {
                    ++_i;
                    return e;
                }
                e.list.push_back(parse());
            }
        }
        if (_s[_i] == ')')
            fail("unexpected ')'");
        SExpr e;
        if (_s[_i] == '|') {
            std::size_t end = _s.find('|', _i + 1);
            if (end == std::string::npos)
                fail("unterminated quoted symbol");
            e.atom = _s.substr(_i + 1, end - _i - 1);
            _i = end + 1;
            return e;
        }
        std::size_t b = _i;
        while (_i < _s.size() && !std::isspace(static_cast<unsigned char>(_s[_i])) && _s[_i] != '(' && _s[_i] != ')')
            ++_i;
        e.atom = _s.substr(b, _i - b);
        return e;
    }

    [[nodiscard]] bool at_end()
    {
        skip();
        return _i >= _s.size();
    }

private:
    void skip()
    {
        while (_i < _s.size() && std::isspace(static_cast<unsigned char>(_s[_i])))
            ++_i;
    }
    [[noreturn]] void fail(const std::string& msg) { throw ProtocolError("malformed solver output: " + msg, _s); }

    const std::string& _s;
    std::size_t _i = 0;
};

Value sexpr_value(const SExpr& e, const std::string& raw)
{
    if (e.is_atom) {
        if (e.atom == "true")
            return true;
        if (e.atom == "false")
            return false;
        if (auto q = parse_rational(e.atom))
            return *q;
        throw ProtocolError("unparseable value '" + e.atom + "'", raw);
    }
    if (e.list.size() == 2 && e.list[0].is_atom && e.list[0].atom == "-") {
        Value v = sexpr_value(e.list[1], raw);
        if (!std::holds_alternative<Rational>(v))
            throw ProtocolError("negated non-number", raw);
        return Rational{-std::get<Rational>(v)};
    }
    if (e.list.size() == 3 && e.list[0].is_atom && e.list[0].atom == "/") {
        Value a = sexpr_value(e.list[1], raw);
        Value b = sexpr_value(e.list[2], raw);
        if (!std::holds_alternative<Rational>(a) || !std::holds_alternative<Rational>(b) ||
            std::get<Rational>(b) == 0)
            throw ProtocolError("malformed division", raw);
        Rational q = std::get<Rational>(a) / std::get<Rational>(b);
        q.canonicalize();
        return q;
    }
    throw ProtocolError("unsupported value expression", raw);
}

} // namespace

Model parse_model(const std::string& text)
{
    Model m;
    SExprParser p(text);
    if (p.at_end())
        return m;
    SExpr top = p.parse();
    if (top.is_atom)
        throw ProtocolError("expected a list of bindings", text);
    for (const auto& binding : top.list) {
        if (binding.is_atom || binding.list.size() != 2 || !binding.list[0].is_atom)
            throw ProtocolError("malformed binding", text);
        m.set(binding.list[0].atom, sexpr_value(binding.list[1], text));
    }
    return m;
}

} // namespace pamp::smt
