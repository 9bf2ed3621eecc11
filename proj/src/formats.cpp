#include "pamp/formats.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace pamp
{

using json = nlohmann::ordered_json;

std::string format_diagnostic(const SourceDiagnostic& d)
{
    std::string sev = d.severity == SourceDiagnostic::Severity::Error ? "error" : "warning";
    return sev + ": " + (d.path.empty() ? "/" : d.path) + ": " + d.message;
}

namespace
{

std::string join_diagnostics(const std::vector<SourceDiagnostic>& diags)
{
    std::string out;
    for (const auto& d : diags) {
        if (!out.empty())
            out += "\n";
        out += format_diagnostic(d);
    }
    return out.empty() ? "invalid document" : out;
}

bool has_errors(const std::vector<SourceDiagnostic>& diags)
{
    return std::any_of(diags.begin(), diags.end(),
                       [](const SourceDiagnostic& d) { return d.severity == SourceDiagnostic::Severity::Error; });
}

class Diags
{
public:
    void error(const std::string& path, const std::string& msg) { list.push_back({path, msg, SourceDiagnostic::Severity::Error}); }
    void warning(const std::string& path, const std::string& msg)
    {
        list.push_back({path, msg, SourceDiagnostic::Severity::Warning});
    }
    [[nodiscard]] bool failed() const { return has_errors(list); }

    std::vector<SourceDiagnostic> list;
};

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t idx) { return path + "/" + std::to_string(idx); }

std::optional<json> parse_json(std::string_view text, Diags& d)
{
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        d.error("", std::string("syntax error: ") + e.what());
        return std::nullopt;
    }
}

const json* member(const json& obj, const char* key)
{
    if (!obj.is_object())
        return nullptr;
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

std::optional<std::string> get_string(const json& obj, const char* key, const std::string& path, Diags& d,
                                      bool required = true)
{
    const json* v = member(obj, key);
    if (!v) {
        if (required)
            d.error(child(path, key), "missing field");
        return std::nullopt;
    }
    if (!v->is_string()) {
        d.error(child(path, key), "expected a string");
        return std::nullopt;
    }
    return v->get<std::string>();
}

std::vector<std::string> get_string_list(const json& obj, const char* key, const std::string& path, Diags& d)
{
    std::vector<std::string> out;
    const json* v = member(obj, key);
    if (!v)
        return out;
    if (!v->is_array()) {
        d.error(child(path, key), "expected a list of strings");
        return out;
    }
    for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_string())
            d.error(child(child(path, key), i), "expected a string");
        else
            out.push_back((*v)[i].get<std::string>());
    }
    return out;
}

std::optional<Rational> rational_value(const json& v, const std::string& path, Diags& d)
{
    if (v.is_number_integer())
        return Rational{std::to_string(v.get<long long>())};
    if (v.is_string()) {
        if (auto q = parse_rational(v.get<std::string>()))
            return q;
    }
    d.error(path, "not a rational literal (expected \"p/q\", an integer or a decimal string)");
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Clock constraints

struct GuardLexer
{
    std::string_view s;
    std::size_t i = 0;

    void skip()
    {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
            ++i;
    }
    bool done()
    {
        skip();
        return i >= s.size();
    }
    bool eat(std::string_view tok)
    {
        skip();
        if (s.substr(i, tok.size()) == tok) {
            i += tok.size();
            return true;
        }
        return false;
    }
    std::optional<std::string> ident()
    {
        skip();
        std::size_t b = i;
        if (i < s.size() && (std::isalpha(static_cast<unsigned char>(s[i])) || s[i] == '_')) {
            ++i;
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
                ++i;
            return std::string{s.substr(b, i - b)};
        }
        return std::nullopt;
    }
    std::optional<std::int64_t> integer()
    {
        skip();
        std::size_t b = i;
        if (i < s.size() && s[i] == '-')
            ++i;
        std::size_t digits = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
            ++i;
        if (i == digits) {
            i = b;
            return std::nullopt;
        }
        try {
            return std::stoll(std::string{s.substr(b, i - b)});
        } catch (const std::out_of_range&) {
            return std::nullopt;
        }
    }
    std::optional<CmpOp> op()
    {
        if (eat("<="))
            return CmpOp::Le;
        if (eat(">="))
            return CmpOp::Ge;
        if (eat("=="))
            return CmpOp::Eq;
        if (eat("<"))
            return CmpOp::Lt;
        if (eat(">"))
            return CmpOp::Gt;
        if (eat("="))
            return CmpOp::Eq;
        return std::nullopt;
    }
};

std::optional<ClockConstraint> parse_guard_at(std::string_view text, const std::vector<std::string>& clocks,
                                              const std::string& path, Diags& d)
{
    GuardLexer lx{text};
    ClockConstraint g;
    if (lx.done())
        return g;
    {
        GuardLexer probe = lx;
        if (probe.eat("true") && probe.done())
            return g;
    }
    auto clock_id = [&](const std::string& name) -> std::optional<ClockId> {
        for (ClockId c = 0; c < clocks.size(); ++c)
            if (clocks[c] == name)
                return c;
        d.error(path, "unknown clock '" + name + "'");
        return std::nullopt;
    };
    for (;;) {
        auto x = lx.ident();
        if (!x) {
            d.error(path, "expected a clock name at offset " + std::to_string(lx.i));
            return std::nullopt;
        }
        ClockAtom a;
        auto xi = clock_id(*x);
        if (!xi)
            return std::nullopt;
        a.x = *xi;
        if (lx.eat("-")) {
            auto y = lx.ident();
            if (!y) {
                d.error(path, "expected a clock name after '-'");
                return std::nullopt;
            }
            auto yi = clock_id(*y);
            if (!yi)
                return std::nullopt;
            a.y = *yi;
        }
        auto op = lx.op();
        if (!op) {
            d.error(path, "expected a comparison operator at offset " + std::to_string(lx.i));
            return std::nullopt;
        }
        a.op = *op;
        auto n = lx.integer();
        if (!n) {
            d.error(path, "expected an integer constant at offset " + std::to_string(lx.i));
            return std::nullopt;
        }
        if (*n < 0 && !a.y) {
            d.error(path, "clock constants must be natural numbers");
            return std::nullopt;
        }
        a.n = *n;
        g.atoms.push_back(a);
        if (lx.done())
            return g;
        if (!lx.eat("&&")) {
            d.error(path, "expected '&&' at offset " + std::to_string(lx.i));
            return std::nullopt;
        }
    }
}

// ---------------------------------------------------------------------------
// Bundle parsing

struct SnapSource
{
    std::vector<std::string> pre, add, del;
    std::optional<std::string> increment;
};

struct ActionSource
{
    std::string name;
    std::string base;
    SnapSource start, end;
    std::vector<std::string> overall;
    Rational lo;
    std::optional<Rational> hi;
    std::string path;
};

SnapSource read_snap(const json& obj, const char* key, const std::string& path, Diags& d)
{
    SnapSource s;
    const json* v = member(obj, key);
    if (!v)
        return s;
    std::string p = child(path, key);
    if (!v->is_object()) {
        d.error(p, "expected an object");
        return s;
    }
    s.pre = get_string_list(*v, "pre", p, d);
    s.add = get_string_list(*v, "add", p, d);
    s.del = get_string_list(*v, "del", p, d);
    s.increment = get_string(*v, "increment", p, d, false);
    return s;
}

std::optional<ActionSource> read_action(const json& a, const std::string& path, Diags& d)
{
    if (!a.is_object()) {
        d.error(path, "expected an object");
        return std::nullopt;
    }
    ActionSource out;
    out.path = path;
    auto name = get_string(a, "name", path, d);
    if (!name)
        return std::nullopt;
    out.name = *name;
    out.base = get_string(a, "base", path, d, false).value_or(out.name);
    out.start = read_snap(a, "start", path, d);
    out.end = read_snap(a, "end", path, d);
    out.overall = get_string_list(a, "overall", path, d);
    if (out.start.increment)
        d.error(child(child(path, "start"), "increment"), "counters can only be incremented by the end snap");
    const json* dur = member(a, "duration");
    std::string dp = child(path, "duration");
    if (!dur || !dur->is_object()) {
        d.error(dp, "missing duration bounds {min, max}");
        return std::nullopt;
    }
    const json* lo = member(*dur, "min");
    if (!lo) {
        d.error(child(dp, "min"), "missing field");
        return std::nullopt;
    }
    auto lov = rational_value(*lo, child(dp, "min"), d);
    if (!lov)
        return std::nullopt;
    out.lo = *lov;
    if (out.lo <= 0)
        d.error(child(dp, "min"), "durations must be positive");
    const json* hi = member(*dur, "max");
    if (hi && !(hi->is_string() && hi->get<std::string>() == "inf") && !hi->is_null()) {
        auto hiv = rational_value(*hi, child(dp, "max"), d);
        if (!hiv)
            return std::nullopt;
        if (*hiv < out.lo)
            d.error(child(dp, "max"), "upper duration bound is below the lower bound");
        out.hi = *hiv;
    }
    return out;
}

struct CounterSource
{
    std::string name;
    std::size_t max = 0;
};

std::string counter_prop(const std::string& counter, std::size_t v) { return counter + "=" + std::to_string(v); }

struct LabelRef
{
    bool snap = false;
    SnapKind kind = SnapKind::Start;
    std::string action;
    std::string internal;
};

LabelRef read_label(const std::string& text)
{
    LabelRef l;
    auto wrapped = [&](std::string_view prefix) {
        return text.size() > prefix.size() + 1 && text.compare(0, prefix.size(), prefix) == 0 && text.back() == ')';
    };
    if (wrapped("start(")) {
        l.snap = true;
        l.kind = SnapKind::Start;
        l.action = text.substr(6, text.size() - 7);
    } else if (wrapped("end(")) {
        l.snap = true;
        l.kind = SnapKind::End;
        l.action = text.substr(4, text.size() - 5);
    } else {
        l.internal = text;
    }
    return l;
}

std::optional<ProblemBundle> build_bundle(const json& doc, Diags& d)
{
    if (!doc.is_object()) {
        d.error("", "expected a JSON object at the top level");
        return std::nullopt;
    }
    ProblemBundle b;
    b.name = get_string(doc, "name", "", d, false).value_or("");
    b.description = get_string(doc, "description", "", d, false).value_or("");
    if (const json* k = member(doc, "kappa")) {
        if (!k->is_number_integer() || k->get<long long>() < 1)
            d.error("/kappa", "kappa must be a positive integer");
        else
            b.model.kappa = static_cast<int>(k->get<long long>());
    }

    // --- problem
    const json* pj = member(doc, "problem");
    if (!pj || !pj->is_object()) {
        d.error("/problem", "missing problem section");
        return std::nullopt;
    }
    auto& tp = b.model.problem;
    tp.props = get_string_list(*pj, "propositions", "/problem", d);
    std::vector<CounterSource> counters;
    if (const json* cj = member(*pj, "counters")) {
        if (!cj->is_array())
            d.error("/problem/counters", "expected a list");
        else
            for (std::size_t i = 0; i < cj->size(); ++i) {
                std::string p = child("/problem/counters", i);
                auto name = get_string((*cj)[i], "name", p, d);
                const json* mx = member((*cj)[i], "max");
                if (!name)
                    continue;
                if (!mx || !mx->is_number_integer() || mx->get<long long>() < 1) {
                    d.error(child(p, "max"), "counter bound must be a positive integer");
                    continue;
                }
                counters.push_back({*name, static_cast<std::size_t>(mx->get<long long>())});
                for (std::size_t v = 0; v <= counters.back().max; ++v)
                    tp.props.push_back(counter_prop(*name, v));
            }
    }
    {
        std::set<std::string> seen;
        for (std::size_t i = 0; i < tp.props.size(); ++i)
            if (!seen.insert(tp.props[i]).second)
                d.error("/problem/propositions", "duplicate proposition '" + tp.props[i] + "'");
    }
    auto prop_ids = [&](const std::vector<std::string>& names, const std::string& path) {
        std::vector<PropId> ids;
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (auto id = tp.find_prop(names[i]))
                ids.push_back(*id);
            else
                d.error(child(path, i), "unknown proposition '" + names[i] + "'");
        }
        return ids;
    };
    tp.init.assign(tp.props.size(), false);
    for (PropId p : prop_ids(get_string_list(*pj, "init", "/problem", d), "/problem/init"))
        tp.init[p] = true;
    for (const auto& c : counters)
        tp.init[*tp.find_prop(counter_prop(c.name, 0))] = true;
    tp.goal = prop_ids(get_string_list(*pj, "goal", "/problem", d), "/problem/goal");

    // Base name -> compiled action ids.
    std::map<std::string, std::vector<ActionId>> by_base;
    std::set<std::string> action_names;
    if (const json* aj = member(*pj, "actions")) {
        if (!aj->is_array())
            d.error("/problem/actions", "expected a list");
        else
            for (std::size_t i = 0; i < aj->size(); ++i) {
                std::string path = child("/problem/actions", i);
                auto src = read_action((*aj)[i], path, d);
                if (!src)
                    continue;
                auto to_spec = [&](const SnapSource& s, const std::string& p) {
                    return SnapActionSpec{prop_ids(s.pre, child(p, "pre")), prop_ids(s.add, child(p, "add")),
                                          prop_ids(s.del, child(p, "del"))};
                };
                DurativeAction base;
                base.name = src->name;
                base.base_name = src->base;
                base.start = to_spec(src->start, child(path, "start"));
                base.end = to_spec(src->end, child(path, "end"));
                base.overall = prop_ids(src->overall, child(path, "overall"));
                base.dur_lo = src->lo;
                base.dur_hi = src->hi;
                std::vector<DurativeAction> copies;
                if (src->end.increment) {
                    auto it = std::find_if(counters.begin(), counters.end(),
                                           [&](const CounterSource& c) { return c.name == *src->end.increment; });
                    if (it == counters.end()) {
                        d.error(child(child(path, "end"), "increment"),
                                "unknown counter '" + *src->end.increment + "'");
                        continue;
                    }
                    for (std::size_t j = 1; j <= it->max; ++j) {
                        DurativeAction c = base;
                        c.name = base.name + "#" + std::to_string(j);
                        c.base_name = base.name;
                        PropId before = *tp.find_prop(counter_prop(it->name, j - 1));
                        PropId after = *tp.find_prop(counter_prop(it->name, j));
                        c.start.pre.push_back(before);
                        c.end.pre.push_back(before);
                        c.end.del.push_back(before);
                        c.end.add.push_back(after);
                        copies.push_back(std::move(c));
                    }
                } else {
                    copies.push_back(std::move(base));
                }
                for (auto& c : copies) {
                    if (!action_names.insert(c.name).second) {
                        d.error(child(path, "name"), "duplicate action '" + c.name + "'");
                        continue;
                    }
                    by_base[c.base_name].push_back(tp.actions.size());
                    if (c.base_name != c.name)
                        by_base[c.name].push_back(tp.actions.size());
                    tp.actions.push_back(std::move(c));
                }
            }
    }

    // --- platform
    const json* tj = member(doc, "platform");
    if (!tj || !tj->is_object()) {
        d.error("/platform", "missing platform section");
        return std::nullopt;
    }
    auto& ta = b.model.platform;
    ta.clocks = get_string_list(*tj, "clocks", "/platform", d);
    if (auto g = get_string(*tj, "global_clock", "/platform", d)) {
        if (auto id = ta.find_clock(*g))
            ta.global_clock = *id;
        else
            d.error("/platform/global_clock", "unknown clock '" + *g + "'");
    }
    const json* lj = member(*tj, "locations");
    if (!lj || !lj->is_array() || lj->empty()) {
        d.error("/platform/locations", "expected a non-empty list of locations");
        return std::nullopt;
    }
    for (std::size_t i = 0; i < lj->size(); ++i) {
        std::string p = child("/platform/locations", i);
        const json& l = (*lj)[i];
        std::string name;
        std::string inv;
        if (l.is_string()) {
            name = l.get<std::string>();
        } else if (auto n = get_string(l, "name", p, d)) {
            name = *n;
            inv = get_string(l, "invariant", p, d, false).value_or("");
        } else {
            continue;
        }
        if (ta.find_location(name))
            d.error(p, "duplicate location '" + name + "'");
        ta.locations.push_back(name);
        ta.invariants.push_back(parse_guard_at(inv, ta.clocks, child(p, "invariant"), d).value_or(ClockConstraint{}));
    }
    if (auto init = get_string(*tj, "initial", "/platform", d)) {
        if (auto id = ta.find_location(*init))
            ta.initial = *id;
        else
            d.error("/platform/initial", "unknown location '" + *init + "'");
    }
    std::set<ActionId> labelled;
    if (const json* trj = member(*tj, "transitions")) {
        if (!trj->is_array())
            d.error("/platform/transitions", "expected a list");
        else
            for (std::size_t i = 0; i < trj->size(); ++i) {
                std::string p = child("/platform/transitions", i);
                const json& t = (*trj)[i];
                auto from = get_string(t, "from", p, d);
                auto to = get_string(t, "to", p, d);
                auto label = get_string(t, "label", p, d);
                if (!from || !to || !label)
                    continue;
                Transition tr;
                auto src = ta.find_location(*from);
                auto dst = ta.find_location(*to);
                if (!src)
                    d.error(child(p, "from"), "unknown location '" + *from + "'");
                if (!dst)
                    d.error(child(p, "to"), "unknown location '" + *to + "'");
                auto guard = parse_guard_at(get_string(t, "guard", p, d, false).value_or(""), ta.clocks,
                                            child(p, "guard"), d);
                for (const auto& r : get_string_list(t, "reset", p, d)) {
                    if (auto c = ta.find_clock(r))
                        tr.resets.push_back(*c);
                    else
                        d.error(child(p, "reset"), "unknown clock '" + r + "'");
                }
                if (!src || !dst || !guard)
                    continue;
                tr.src = *src;
                tr.dst = *dst;
                tr.guard = *guard;
                LabelRef lr = read_label(*label);
                if (!lr.snap) {
                    tr.label = Label::tau(lr.internal);
                    ta.transitions.push_back(tr);
                    continue;
                }
                auto it = by_base.find(lr.action);
                if (it == by_base.end()) {
                    d.error(child(p, "label"), "label refers to unknown action '" + lr.action + "'");
                    continue;
                }
                for (ActionId a : it->second) {
                    tr.label = Label::snap({a, lr.kind});
                    labelled.insert(a);
                    ta.transitions.push_back(tr);
                }
            }
    }
    for (ActionId a = 0; a < tp.actions.size(); ++a)
        if (!labelled.count(a))
            d.error("/problem/actions", "action '" + tp.actions[a].name + "' has no transition in the platform");

    // --- bad states
    if (const json* bj = member(doc, "bad")) {
        if (!bj->is_array())
            d.error("/bad", "expected a list");
        else
            for (std::size_t i = 0; i < bj->size(); ++i) {
                std::string p = child("/bad", i);
                auto loc = get_string((*bj)[i], "location", p, d);
                if (!loc)
                    continue;
                auto id = ta.find_location(*loc);
                if (!id) {
                    d.error(child(p, "location"), "unknown location '" + *loc + "'");
                    continue;
                }
                auto guard = parse_guard_at(get_string((*bj)[i], "guard", p, d, false).value_or(""), ta.clocks,
                                            child(p, "guard"), d);
                if (guard)
                    b.model.bad.entries.push_back({*id, *guard});
            }
    }

    if (d.failed())
        return std::nullopt;
    try {
        b.model.check();
    } catch (const ModelError& e) {
        d.error("", e.what());
        return std::nullopt;
    }
    return b;
}

json snap_json(const TemporalPlanningProblem& p, const SnapActionSpec& s)
{
    auto names = [&](const std::vector<PropId>& ids) {
        json arr = json::array();
        for (PropId id : ids)
            arr.push_back(p.props[id]);
        return arr;
    };
    return json{{"pre", names(s.pre)}, {"add", names(s.add)}, {"del", names(s.del)}};
}

} // namespace

FormatError::FormatError(std::vector<SourceDiagnostic> diags)
    : std::runtime_error(join_diagnostics(diags)), _diags(std::move(diags))
{
}

ParseResult<ClockConstraint> parse_clock_constraint(std::string_view text, const std::vector<std::string>& clocks)
{
    Diags d;
    auto g = parse_guard_at(text, clocks, "", d);
    return {g, d.list};
}

std::string format_clock_constraint(const ClockConstraint& g, const std::vector<std::string>& clocks)
{
    if (g.atoms.empty())
        return "true";
    std::string out;
    for (const auto& a : g.atoms) {
        if (!out.empty())
            out += " && ";
        out += clocks.at(a.x);
        if (a.y)
            out += " - " + clocks.at(*a.y);
        out += " " + std::string(to_string(a.op)) + " " + std::to_string(a.n);
    }
    return out;
}

ParseResult<ProblemBundle> parse_problem_bundle(std::string_view text)
{
    Diags d;
    auto doc = parse_json(text, d);
    if (!doc)
        return {std::nullopt, d.list};
    auto b = build_bundle(*doc, d);
    return {std::move(b), d.list};
}

ProblemBundle load_problem_bundle(std::string_view text)
{
    auto r = parse_problem_bundle(text);
    if (!r.ok())
        throw FormatError(r.diagnostics);
    return std::move(*r.value);
}

std::string serialize_problem_bundle(const ProblemBundle& bundle)
{
    const auto& tp = bundle.model.problem;
    const auto& ta = bundle.model.platform;
    json doc;
    doc["name"] = bundle.name;
    doc["description"] = bundle.description;
    doc["kappa"] = bundle.model.kappa;

    json problem;
    problem["propositions"] = tp.props;
    json init = json::array();
    for (PropId p = 0; p < tp.props.size(); ++p)
        if (tp.init[p])
            init.push_back(tp.props[p]);
    problem["init"] = init;
    json goal = json::array();
    for (PropId g : tp.goal)
        goal.push_back(tp.props[g]);
    problem["goal"] = goal;
    json actions = json::array();
    for (const auto& a : tp.actions) {
        json aj;
        aj["name"] = a.name;
        if (!a.base_name.empty() && a.base_name != a.name)
            aj["base"] = a.base_name;
        aj["duration"] = json{{"min", to_fraction_string(a.dur_lo)},
                              {"max", a.dur_hi ? json(to_fraction_string(*a.dur_hi)) : json("inf")}};
        aj["start"] = snap_json(tp, a.start);
        aj["end"] = snap_json(tp, a.end);
        json overall = json::array();
        for (PropId p : a.overall)
            overall.push_back(tp.props[p]);
        aj["overall"] = overall;
        actions.push_back(aj);
    }
    problem["actions"] = actions;
    doc["problem"] = problem;

    json platform;
    platform["clocks"] = ta.clocks;
    platform["global_clock"] = ta.clocks.at(ta.global_clock);
    json locs = json::array();
    for (LocationId l = 0; l < ta.locations.size(); ++l)
        locs.push_back(json{{"name", ta.locations[l]}, {"invariant", format_clock_constraint(ta.invariants[l], ta.clocks)}});
    platform["locations"] = locs;
    platform["initial"] = ta.locations.at(ta.initial);
    json trs = json::array();
    for (const auto& t : ta.transitions) {
        json resets = json::array();
        for (ClockId c : t.resets)
            resets.push_back(ta.clocks[c]);
        trs.push_back(json{{"from", ta.locations[t.src]},
                           {"to", ta.locations[t.dst]},
                           {"label", ta.label_name(tp, t.label)},
                           {"guard", format_clock_constraint(t.guard, ta.clocks)},
                           {"reset", resets}});
    }
    platform["transitions"] = trs;
    doc["platform"] = platform;

    json bad = json::array();
    for (const auto& e : bundle.model.bad.entries)
        bad.push_back(json{{"location", ta.locations[e.location]}, {"guard", format_clock_constraint(e.guard, ta.clocks)}});
    doc["bad"] = bad;
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Plans

ParseResult<TimeTriggeredPlan> parse_plan(std::string_view text, const TemporalPlanningProblem& problem)
{
    Diags d;
    auto doc = parse_json(text, d);
    if (!doc)
        return {std::nullopt, d.list};
    const json* entries = doc->is_array() ? &*doc : member(*doc, "plan");
    if (!entries || !entries->is_array()) {
        d.error("/plan", "expected a list of plan entries");
        return {std::nullopt, d.list};
    }
    std::string base_path = doc->is_array() ? "" : "/plan";

    struct Pending
    {
        std::string name;
        Rational start, duration;
        std::string path;
    };
    std::vector<Pending> pending;
    for (std::size_t i = 0; i < entries->size(); ++i) {
        std::string p = child(base_path, i);
        const json& e = (*entries)[i];
        auto name = get_string(e, "action", p, d);
        const json* s = member(e, "start");
        const json* du = member(e, "duration");
        if (!s)
            d.error(child(p, "start"), "missing field");
        if (!du)
            d.error(child(p, "duration"), "missing field");
        if (!name || !s || !du)
            continue;
        auto sv = rational_value(*s, child(p, "start"), d);
        auto dv = rational_value(*du, child(p, "duration"), d);
        if (!sv || !dv)
            continue;
        if (*dv <= 0) {
            d.error(child(p, "duration"), "durations must be positive rationals");
            continue;
        }
        if (*sv < 0) {
            d.error(child(p, "start"), "start times must be non-negative");
            continue;
        }
        pending.push_back({*name, *sv, *dv, p});
    }

    // Base names are resolved to copies in start-time order.
    std::map<std::string, std::vector<std::size_t>> by_base;
    TimeTriggeredPlan plan;
    plan.entries.resize(pending.size());
    for (std::size_t i = 0; i < pending.size(); ++i) {
        if (auto a = problem.find_action(pending[i].name)) {
            plan.entries[i] = {*a, pending[i].start, pending[i].duration};
            continue;
        }
        by_base[pending[i].name].push_back(i);
    }
    for (auto& [base, idxs] : by_base) {
        std::vector<ActionId> copies;
        for (ActionId a = 0; a < problem.actions.size(); ++a)
            if (problem.actions[a].base_name == base)
                copies.push_back(a);
        if (copies.empty()) {
            for (std::size_t i : idxs)
                d.error(child(pending[i].path, "action"), "unknown action '" + base + "'");
            continue;
        }
        if (idxs.size() > copies.size()) {
            d.error(child(pending[idxs.back()].path, "action"),
                    "more occurrences of '" + base + "' than its counter allows");
            continue;
        }
        std::stable_sort(idxs.begin(), idxs.end(),
                         [&](std::size_t x, std::size_t y) { return pending[x].start < pending[y].start; });
        for (std::size_t k = 0; k < idxs.size(); ++k)
            plan.entries[idxs[k]] = {copies[k], pending[idxs[k]].start, pending[idxs[k]].duration};
    }
    if (d.failed())
        return {std::nullopt, d.list};
    return {std::move(plan), d.list};
}

std::string serialize_plan(const TemporalPlanningProblem& problem, const TimeTriggeredPlan& plan,
                           const SolveStatistics* stats)
{
    // Copies are written under their base name when start order reproduces
    // the copy assignment, otherwise under their exact name.
    std::map<std::string, std::vector<std::size_t>> by_base;
    for (std::size_t i = 0; i < plan.entries.size(); ++i)
        by_base[problem.actions.at(plan.entries[i].action).base_name].push_back(i);
    std::set<std::string> use_base;
    for (auto& [base, idxs] : by_base) {
        std::vector<ActionId> copies;
        for (ActionId a = 0; a < problem.actions.size(); ++a)
            if (problem.actions[a].base_name == base)
                copies.push_back(a);
        if (copies.size() <= 1 || base.empty())
            continue;
        auto sorted = idxs;
        std::stable_sort(sorted.begin(), sorted.end(), [&](std::size_t x, std::size_t y) {
            return plan.entries[x].start < plan.entries[y].start;
        });
        bool ok = true;
        for (std::size_t k = 0; k < sorted.size(); ++k)
            ok = ok && plan.entries[sorted[k]].action == copies[k];
        if (ok)
            use_base.insert(base);
    }

    json entries = json::array();
    for (const auto& e : plan.entries) {
        const auto& a = problem.actions.at(e.action);
        std::string name = use_base.count(a.base_name) ? a.base_name : a.name;
        entries.push_back(
            json{{"action", name}, {"start", to_fraction_string(e.start)}, {"duration", to_fraction_string(e.duration)}});
    }
    json doc;
    doc["plan"] = entries;
    if (stats)
        doc["statistics"] = json{{"mode", stats->mode},
                                 {"solver_calls", stats->solver_calls},
                                 {"iterations", stats->iterations},
                                 {"learned_prefixes", stats->learned_prefixes},
                                 {"horizon", stats->horizon},
                                 {"wall_seconds", stats->wall_seconds}};
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Reports

std::string_view to_string(ReportVerdict v)
{
    switch (v) {
    case ReportVerdict::Solution:
        return "SOLUTION";
    case ReportVerdict::NoSolutionWithinBound:
        return "NO-SOLUTION-WITHIN-BOUND";
    case ReportVerdict::Unsafe:
        return "UNSAFE";
    case ReportVerdict::NonExecutable:
        return "NON-EXECUTABLE";
    case ReportVerdict::InvalidPlan:
        return "INVALID-PLAN";
    case ReportVerdict::Unknown:
        return "UNKNOWN";
    }
    return "UNKNOWN";
}

std::optional<ReportVerdict> parse_report_verdict(std::string_view s)
{
    for (auto v : {ReportVerdict::Solution, ReportVerdict::NoSolutionWithinBound, ReportVerdict::Unsafe,
                   ReportVerdict::NonExecutable, ReportVerdict::InvalidPlan, ReportVerdict::Unknown})
        if (to_string(v) == s)
            return v;
    return std::nullopt;
}

std::string serialize_report(const PampProblem& model, const Report& report)
{
    const auto& ta = model.platform;
    json doc;
    doc["verdict"] = std::string(to_string(report.verdict));
    doc["message"] = report.message;
    if (report.plan)
        doc["plan"] = json::parse(serialize_plan(model.problem, *report.plan))["plan"];
    if (report.witness) {
        const auto& w = *report.witness;
        auto state_json = [&](const TAState& s) {
            json clocks = json::object();
            for (ClockId c = 0; c < ta.clocks.size(); ++c)
                clocks[ta.clocks[c]] = to_fraction_string(s.valuation[c]);
            return json{{"location", ta.locations[s.location]}, {"clocks", clocks}};
        };
        json steps = json::array();
        for (const auto& st : w.run) {
            json sj;
            if (st.kind == WitnessStep::Kind::Delay) {
                sj["delay"] = to_fraction_string(st.delay);
            } else {
                sj["fire"] = ta.label_name(model.problem, ta.transitions[st.transition].label);
                sj["from"] = ta.locations[ta.transitions[st.transition].src];
            }
            sj["state"] = state_json(st.after);
            steps.push_back(sj);
        }
        json wj;
        wj["obligation"] = w.obligation == Witness::Obligation::Executability ? "executability" : "safety";
        wj["initial"] = state_json(w.initial);
        wj["steps"] = steps;
        if (w.obligation == Witness::Obligation::Executability)
            wj["event_index"] = w.event_index;
        else
            wj["bad_step"] = w.bad_step;
        doc["witness"] = wj;
    }
    const auto& s = report.stats;
    doc["statistics"] = json{{"mode", s.mode},
                             {"solver_calls", s.solver_calls},
                             {"iterations", s.iterations},
                             {"learned_prefixes", s.learned_prefixes},
                             {"horizon", s.horizon},
                             {"wall_seconds", s.wall_seconds}};
    return doc.dump(2) + "\n";
}

ParseResult<std::string> render_report(std::string_view text)
{
    Diags d;
    auto doc = parse_json(text, d);
    if (!doc)
        return {std::nullopt, d.list};
    auto verdict = get_string(*doc, "verdict", "", d);
    if (!verdict)
        return {std::nullopt, d.list};
    if (!parse_report_verdict(*verdict)) {
        d.error("/verdict", "unknown verdict '" + *verdict + "'");
        return {std::nullopt, d.list};
    }
    std::ostringstream os;
    os << "verdict: " << *verdict << "\n";
    if (auto m = get_string(*doc, "message", "", d, false); m && !m->empty())
        os << "message: " << *m << "\n";
    if (const json* plan = member(*doc, "plan"); plan && plan->is_array()) {
        os << "plan:\n";
        for (const auto& e : *plan)
            os << "  " << e.value("start", std::string("?")) << ": (" << e.value("action", std::string("?")) << ") ["
               << e.value("duration", std::string("?")) << "]\n";
    }
    auto show_state = [&](const json& s) {
        std::string out = s.value("location", std::string("?")) + " {";
        bool first = true;
        if (const json* c = member(s, "clocks"))
            for (auto it = c->begin(); it != c->end(); ++it) {
                auto q = it->is_string() ? parse_rational(it->get<std::string>()) : std::nullopt;
                out += (first ? "" : ", ") + it.key() + "=" + (q ? to_display_string(*q) : std::string("?"));
                first = false;
            }
        return out + "}";
    };
    if (const json* w = member(*doc, "witness"); w && w->is_object()) {
        os << "witness (" << w->value("obligation", std::string("?")) << "):\n";
        if (const json* init = member(*w, "initial"))
            os << "  " << show_state(*init) << "\n";
        if (const json* steps = member(*w, "steps"))
            for (const auto& st : *steps) {
                if (st.contains("delay")) {
                    auto q = parse_rational(st["delay"].get<std::string>());
                    if (q && *q == 0)
                        continue;
                    os << "  --delay " << (q ? to_display_string(*q) : "?") << "--> ";
                } else {
                    os << "  --" << st.value("fire", std::string("?")) << "--> ";
                }
                os << (st.contains("state") ? show_state(st["state"]) : "?") << "\n";
            }
    }
    if (const json* s = member(*doc, "statistics"); s && s->is_object()) {
        os << "statistics:";
        for (auto it = s->begin(); it != s->end(); ++it)
            os << " " << it.key() << "=" << (it->is_string() ? it->get<std::string>() : it->dump());
        os << "\n";
    }
    return {os.str(), d.list};
}

} // namespace pamp
