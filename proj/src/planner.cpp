#include "pamp/planner.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <unordered_map>

namespace pamp
{

std::optional<Stn> Stn::with_constraint(std::optional<std::size_t> i, std::optional<std::size_t> j,
                                        const Bound& b) const
{
    auto var = [this](std::optional<std::size_t> e) -> std::size_t {
        if (!e)
            return 0;
        if (*e >= _events.size())
            throw std::out_of_range("STN constraint references unknown event " + std::to_string(*e));
        return *e + 1;
    };
    Stn out = *this;
    if (!out._dbm.constrain(var(i), var(j), b))
        return std::nullopt;
    return out;
}

std::optional<Stn> Stn::append(const TemporalPlanningProblem& problem, SnapEventRef ev,
                               std::optional<std::size_t> start_index) const
{
    Stn out = *this;
    std::size_t x = out._dbm.add_variable();
    out._events.push_back(ev);
    if (!out._dbm.constrain(0, x, Bound::le(0)))
        return std::nullopt;
    if (x > 1 && !out._dbm.constrain(x - 1, x, Bound::lt(0)))
        return std::nullopt;
    if (start_index) {
        const auto& a = problem.actions[ev.action];
        std::size_t s = *start_index + 1;
        if (!out._dbm.constrain(s, x, Bound::le(-a.dur_lo)))
            return std::nullopt;
        if (a.dur_hi && !out._dbm.constrain(x, s, Bound::le(*a.dur_hi)))
            return std::nullopt;
    }
    return out;
}

std::vector<Rational> Stn::schedule() const
{
    auto v = _dbm.sample();
    return {v.begin() + 1, v.end()};
}

bool SearchNode::is_goal(const TemporalPlanningProblem& problem) const
{
    if (!open.empty())
        return false;
    return std::all_of(problem.goal.begin(), problem.goal.end(), [this](PropId g) { return state[g]; });
}

SearchNode initial_node(const TemporalPlanningProblem& problem) { return SearchNode{problem.init, {}, Stn{}}; }

std::vector<SearchNode> successors(const SearchNode& node, const TemporalPlanningProblem& problem)
{
    std::vector<SearchNode> out;
    for (ActionId a = 0; a < problem.actions.size(); ++a) {
        auto it = std::find_if(node.open.begin(), node.open.end(), [a](const OpenAction& o) { return o.action == a; });
        bool is_open = it != node.open.end();
        SnapEventRef ev{a, is_open ? SnapKind::End : SnapKind::Start};
        const auto& spec = snap_spec(problem, ev);
        if (!std::all_of(spec.pre.begin(), spec.pre.end(), [&](PropId p) { return node.state[p]; }))
            continue;
        SearchNode child;
        child.state = apply_snap_action(problem, node.state, spec);
        child.open = node.open;
        std::optional<std::size_t> start_index;
        if (is_open) {
            start_index = it->start_index;
            child.open.erase(child.open.begin() + (it - node.open.begin()));
        } else {
            OpenAction o{a, node.stn.size()};
            child.open.insert(std::upper_bound(child.open.begin(), child.open.end(), o,
                                               [](const OpenAction& x, const OpenAction& y) {
                                                   return x.action < y.action;
                                               }),
                              o);
        }
        bool overall_ok = std::all_of(child.open.begin(), child.open.end(), [&](const OpenAction& o) {
            const auto& inv = problem.actions[o.action].overall;
            return std::all_of(inv.begin(), inv.end(), [&](PropId p) { return child.state[p]; });
        });
        if (!overall_ok)
            continue;
        auto stn = node.stn.append(problem, ev, start_index);
        if (!stn)
            continue;
        child.stn = std::move(*stn);
        out.push_back(std::move(child));
    }
    return out;
}

// ---------------------------------------------------------------------------

PrefixTrie::PrefixTrie() : _nodes(1) {}

bool PrefixTrie::insert(const std::vector<SnapEventRef>& prefix)
{
    std::size_t at = 0;
    for (const auto& ev : prefix) {
        if (_nodes[at].terminal)
            return false;
        auto it = _nodes[at].kids.find(ev);
        if (it == _nodes[at].kids.end()) {
            _nodes.emplace_back();
            it = _nodes[at].kids.emplace(ev, _nodes.size() - 1).first;
        }
        at = it->second;
    }
    if (_nodes[at].terminal)
        return false;
    _nodes[at].terminal = true;
    ++_size;
    return true;
}

bool PrefixTrie::forbids(const std::vector<SnapEventRef>& path) const
{
    long at = root;
    if (_nodes[0].terminal)
        return true;
    for (const auto& ev : path) {
        at = step(at, ev);
        if (at == forbidden)
            return true;
        if (at == off)
            return false;
    }
    return false;
}

long PrefixTrie::step(long at, SnapEventRef ev) const
{
    if (at < 0)
        return at;
    const auto& kids = _nodes[static_cast<std::size_t>(at)].kids;
    auto it = kids.find(ev);
    if (it == kids.end())
        return off;
    return _nodes[it->second].terminal ? forbidden : static_cast<long>(it->second);
}

std::string_view to_string(SearchStrategy s)
{
    return s == SearchStrategy::Greedy ? "greedy" : "id";
}

std::optional<SearchStrategy> parse_search_strategy(std::string_view s)
{
    if (s == "id")
        return SearchStrategy::IterativeDeepening;
    if (s == "greedy")
        return SearchStrategy::Greedy;
    return std::nullopt;
}

namespace
{

// The future of a node depends only on its logical state, its open actions
// and the network restricted to the last event and the open starts (later
// events only constrain those), plus where its path sits in the trie.
std::string node_key(const SearchNode& n, long trie_at)
{
    std::string key;
    for (bool b : n.state)
        key.push_back(b ? '1' : '0');
    key += '|' + std::to_string(trie_at) + '|';
    std::vector<std::size_t> vars;
    if (n.stn.size() > 0)
        vars.push_back(n.stn.size());
    for (const auto& o : n.open) {
        key += std::to_string(o.action) + ',';
        vars.push_back(o.start_index + 1);
    }
    key += '|';
    const Dbm& d = n.stn.dbm();
    for (std::size_t i : vars)
        for (std::size_t j : vars) {
            if (i == j)
                continue;
            const Bound& b = d.at(i, j);
            key += b.infinite ? std::string("inf") : (b.strict ? "<" : "<=") + to_fraction_string(b.value);
            key += ';';
        }
    return key;
}

class Search
{
public:
    Search(const TemporalPlanningProblem& problem, const PrefixTrie& trie, const PlannerConfig& cfg)
        : _problem(problem), _trie(trie), _cfg(cfg)
    {
    }

    PlanOutcome run()
    {
        if (_trie.forbids({}))
            return {PlanOutcome::Status::Exhausted, std::nullopt, 0};
        try {
            if (_cfg.strategy == SearchStrategy::Greedy)
                greedy();
            else
                deepen();
        } catch (const BudgetHit&) {
            _out.status = PlanOutcome::Status::BudgetExceeded;
        }
        _out.expanded = _expanded;
        return _out;
    }

private:
    struct BudgetHit
    {
    };

    void count()
    {
        if (++_expanded > _cfg.node_budget)
            throw BudgetHit{};
    }

    void found(const SearchNode& n)
    {
        _out.status = PlanOutcome::Status::Found;
        _out.plan = StnPlan{n.stn};
    }

    void deepen()
    {
        // Complete plans have even length.
        std::size_t first = _cfg.min_path_len + (_cfg.min_path_len % 2);
        for (std::size_t bound = first; bound <= _cfg.max_path_len; bound += 2) {
            _failed.clear();
            if (dfs(initial_node(_problem), PrefixTrie::root, bound))
                return;
        }
        _out.status = PlanOutcome::Status::Exhausted;
    }

    bool dfs(const SearchNode& n, long at, std::size_t left)
    {
        if (n.is_goal(_problem)) {
            found(n);
            return true;
        }
        if (left == 0)
            return false;
        std::string key = node_key(n, at);
        if (auto it = _failed.find(key); it != _failed.end() && it->second >= left)
            return false;
        count();
        for (const auto& child : successors(n, _problem)) {
            long next = _trie.step(at, child.path().back());
            if (next == PrefixTrie::forbidden)
                continue;
            if (dfs(child, next, left - 1))
                return true;
        }
        auto& best = _failed[key];
        best = std::max(best, left);
        return false;
    }

    std::size_t distance(const SearchNode& n) const
    {
        std::size_t h = n.open.size();
        for (PropId g : _problem.goal)
            h += n.state[g] ? 0 : 1;
        return h;
    }

    void greedy()
    {
        struct Entry
        {
            std::size_t h, depth, seq;
            SearchNode node;
            long at;
        };
        auto worse = [](const Entry& a, const Entry& b) {
            return std::tie(a.h, a.depth, a.seq) > std::tie(b.h, b.depth, b.seq);
        };
        std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> queue(worse);
        std::unordered_map<std::string, std::size_t> seen; // key -> shallowest depth
        std::size_t seq = 0;
        SearchNode init = initial_node(_problem);
        queue.push({distance(init), 0, seq++, init, PrefixTrie::root});
        while (!queue.empty()) {
            Entry e = queue.top();
            queue.pop();
            if (e.node.is_goal(_problem)) {
                found(e.node);
                return;
            }
            if (e.depth >= _cfg.max_path_len)
                continue;
            std::string key = node_key(e.node, e.at);
            if (auto it = seen.find(key); it != seen.end() && it->second <= e.depth)
                continue;
            seen[key] = e.depth;
            count();
            for (auto& child : successors(e.node, _problem)) {
                long next = _trie.step(e.at, child.path().back());
                if (next == PrefixTrie::forbidden)
                    continue;
                std::size_t h = distance(child);
                queue.push({h, e.depth + 1, seq++, std::move(child), next});
            }
        }
        _out.status = PlanOutcome::Status::Exhausted;
    }

    const TemporalPlanningProblem& _problem;
    const PrefixTrie& _trie;
    const PlannerConfig& _cfg;
    PlanOutcome _out;
    std::size_t _expanded = 0;
    std::unordered_map<std::string, std::size_t> _failed;
};

} // namespace

PlanOutcome plan(const TemporalPlanningProblem& problem, const PrefixTrie& bad_prefixes, const PlannerConfig& cfg)
{
    return Search(problem, bad_prefixes, cfg).run();
}

std::vector<SnapEventRef> path(const StnPlan& p) { return p.events(); }

TimeTriggeredPlan plan_from_schedule(const std::vector<SnapEventRef>& events, const std::vector<Rational>& times)
{
    TimeTriggeredPlan out;
    std::map<ActionId, std::size_t> open; // action -> entry index
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& ev = events[i];
        if (ev.kind == SnapKind::Start) {
            open[ev.action] = out.entries.size();
            out.entries.push_back({ev.action, times[i], Rational{0}});
            continue;
        }
        auto it = open.find(ev.action);
        if (it == open.end())
            throw std::logic_error("end event without an open start");
        auto& e = out.entries[it->second];
        e.duration = times[i] - e.start;
        open.erase(it);
    }
    if (!open.empty())
        throw std::logic_error("event ordering leaves an action open");
    return out;
}

} // namespace pamp
