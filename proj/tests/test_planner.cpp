#include "pamp/bench.hpp"
#include "pamp/planner.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace pamp;
using test::q;

namespace
{

const ProblemBundle& factory()
{
    static const ProblemBundle b = gen_factory(1, 2, 50, 2);
    return b;
}

SnapEventRef ev(const TemporalPlanningProblem& tp, const std::string& name, SnapKind k)
{
    return {*tp.find_action(name), k};
}

bool has_prefix(const std::vector<SnapEventRef>& path, const std::vector<SnapEventRef>& prefix)
{
    return prefix.size() <= path.size() && std::equal(prefix.begin(), prefix.end(), path.begin());
}

/// Appends events in order, pairing each end with the latest open start.
std::optional<Stn> build_stn(const TemporalPlanningProblem& tp, const std::vector<SnapEventRef>& events)
{
    Stn stn;
    std::map<ActionId, std::size_t> open;
    for (std::size_t i = 0; i < events.size(); ++i) {
        std::optional<std::size_t> start;
        if (events[i].kind == SnapKind::End)
            start = open.at(events[i].action);
        else
            open[events[i].action] = i;
        auto next = stn.append(tp, events[i], start);
        if (!next)
            return std::nullopt;
        stn = *next;
    }
    return stn;
}

/// Every returned plan instantiated by the network's schedule is valid at
/// the planning level and follows the path order.
void check_returned(const TemporalPlanningProblem& tp, const StnPlan& p)
{
    auto times = p.stn.schedule();
    REQUIRE(times.size() == p.events().size());
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        CHECK(times[i] < times[i + 1]);
    if (!times.empty())
        CHECK(times.front() >= 0);
    TimeTriggeredPlan plan = plan_from_schedule(path(p), times);
    auto err = check_plan_valid(tp, plan);
    CHECK_MESSAGE(!err, *err);
}

} // namespace

TEST_SUITE("networks")
{
    TEST_CASE("a bound against the ordering is inconsistent and leaves the network unchanged")
    {
        TemporalPlanningProblem tp;
        tp.props = {"p"};
        tp.init = {false};
        DurativeAction a;
        a.name = a.base_name = "a";
        a.dur_lo = 1;
        tp.actions = {a};
        Stn stn = *Stn{}.append(tp, {0, SnapKind::Start}, std::nullopt);
        stn = *stn.append(tp, {0, SnapKind::End}, 0);
        CHECK_FALSE(stn.with_constraint(1, 0, Bound::le(q(-1))));
        CHECK(stn.with_constraint(1, 0, Bound::le(q(1))));
        CHECK(stn.size() == 2);
        CHECK_THROWS_AS((void)stn.with_constraint(5, 0, Bound::le(q(1))), std::out_of_range);
        // Neither time may be negative.
        CHECK_FALSE(stn.with_constraint(0, std::nullopt, Bound::lt(q(0))));
        CHECK(stn.with_constraint(std::nullopt, 0, Bound::lt(q(0))));
    }

    TEST_CASE("the running-example ordering with Cooldown is schedulable")
    {
        const auto& tp = factory().model.problem;
        std::vector<SnapEventRef> events{
            ev(tp, "Process", SnapKind::Start), ev(tp, "Work#1", SnapKind::Start), ev(tp, "Work#1", SnapKind::End),
            ev(tp, "Cooldown", SnapKind::Start), ev(tp, "Cooldown", SnapKind::End), ev(tp, "Work#2", SnapKind::Start),
            ev(tp, "Work#2", SnapKind::End), ev(tp, "Process", SnapKind::End)};
        auto stn = build_stn(tp, events);
        REQUIRE(stn);
        StnPlan p{*stn};
        CHECK(path(p) == events);
        check_returned(tp, p);
        auto times = stn->schedule();
        CHECK(times[2] - times[1] == 20); // Work lasts exactly 20
        CHECK(times[6] - times[5] == 20);
        CHECK(path(StnPlan{}).empty());
    }

    TEST_CASE("consistency matches Bellman-Ford recomputed from scratch")
    {
        test::Rng rng(41);
        std::uniform_int_distribution<int> n_events(1, 5), val(-6, 6), coin(0, 1), count(1, 8);
        TemporalPlanningProblem tp;
        tp.props = {"p"};
        tp.init = {false};
        DurativeAction a;
        a.name = a.base_name = "a";
        a.dur_lo = 1;
        tp.actions = {a};
        for (int round = 0; round < 300; ++round) {
            // Start events of fresh copies keep the appended constraints to
            // ordering and non-negativity only.
            const std::size_t n = static_cast<std::size_t>(n_events(rng));
            TemporalPlanningProblem many = tp;
            many.actions.assign(n, a);
            Stn stn;
            for (std::size_t i = 0; i < n; ++i)
                stn = *stn.append(many, {static_cast<ActionId>(i), SnapKind::Start}, std::nullopt);
            std::vector<test::DiffEdge> edges;
            for (std::size_t i = 0; i < n; ++i) {
                edges.push_back({i + 1, 0, q(0), false});
                if (i > 0)
                    edges.push_back({i + 1, i, q(0), true});
            }
            int k = count(rng);
            bool alive = true;
            std::uniform_int_distribution<int> var(-1, static_cast<int>(n) - 1);
            for (int c = 0; c < k && alive; ++c) {
                int i = var(rng), j = var(rng);
                if (i == j)
                    continue;
                Bound b = coin(rng) ? Bound::lt(q(val(rng))) : Bound::le(q(val(rng)));
                auto opt = [](int v) { return v < 0 ? std::nullopt : std::optional<std::size_t>(v); };
                auto next = stn.with_constraint(opt(i), opt(j), b);
                // x_i - x_j <= b is the edge j -> i.
                edges.push_back({static_cast<std::size_t>(j + 1), static_cast<std::size_t>(i + 1), b.value, b.strict});
                bool oracle = test::bellman_ford_consistent(n + 1, edges);
                CAPTURE(round);
                CHECK(next.has_value() == oracle);
                if (!next)
                    alive = false;
                else
                    stn = *next;
            }
        }
    }
}

TEST_SUITE("search nodes")
{
    TEST_CASE("the running example cannot begin with Work")
    {
        // Work's over-all condition needs the process running; Cooldown has
        // no planning-level precondition.
        const auto& tp = factory().model.problem;
        std::vector<SnapEventRef> firsts;
        for (const auto& k : successors(initial_node(tp), tp))
            firsts.push_back(k.path().back());
        CHECK(firsts == std::vector<SnapEventRef>{ev(tp, "Process", SnapKind::Start), ev(tp, "Cooldown", SnapKind::Start)});
    }

    TEST_CASE("closing Work advances the step counter")
    {
        const auto& tp = factory().model.problem;
        SearchNode n = initial_node(tp);
        auto follow = [&](SnapEventRef e) {
            auto kids = successors(n, tp);
            auto it = std::find_if(kids.begin(), kids.end(), [&](const SearchNode& k) { return k.path().back() == e; });
            REQUIRE(it != kids.end());
            n = *it;
        };
        follow(ev(tp, "Process", SnapKind::Start));
        follow(ev(tp, "Work#1", SnapKind::Start));
        CHECK(n.open.size() == 2);
        auto before = n.state;
        follow(ev(tp, "Work#1", SnapKind::End));
        CHECK(n.open.size() == 1);
        CHECK(n.state != before);
        // A counter proposition for one finished Work now holds.
        bool counted = false;
        for (PropId p = 0; p < tp.props.size(); ++p)
            if (n.state[p] && !before[p] && tp.props[p].find("=1") != std::string::npos)
                counted = true;
        CHECK(counted);
        // No self-overlap: Work#1 cannot start while open, and every child
        // keeps open actions distinct.
        for (const auto& k : successors(n, tp)) {
            std::set<ActionId> ids;
            for (const auto& o : k.open)
                CHECK(ids.insert(o.action).second);
        }
    }

    TEST_CASE("a node with only unschedulable children has none")
    {
        // a lasts exactly 1; c cannot end (its end needs a proposition nobody
        // adds). Once c's start is pinned 2 after a's start, ending a breaks
        // its duration.
        TemporalPlanningProblem tp;
        tp.props = {"never"};
        tp.init = {false};
        DurativeAction a;
        a.name = a.base_name = "a";
        a.dur_lo = 1;
        a.dur_hi = q(1);
        DurativeAction c;
        c.name = c.base_name = "c";
        c.dur_lo = 1;
        c.end.pre = {0};
        tp.actions = {a, c};
        SearchNode n = initial_node(tp);
        auto pick = [&](SnapEventRef e) {
            auto kids = successors(n, tp);
            auto it = std::find_if(kids.begin(), kids.end(), [&](const SearchNode& k) { return k.path().back() == e; });
            REQUIRE(it != kids.end());
            n = *it;
        };
        pick({0, SnapKind::Start});
        pick({1, SnapKind::Start});
        CHECK(successors(n, tp).size() == 1); // a's end, still schedulable
        n.stn = *n.stn.with_constraint(0, 1, Bound::le(q(-2)));
        CHECK(successors(n, tp).empty());
    }
}

TEST_SUITE("prefix trie")
{
    TEST_CASE("stored prefixes forbid their extensions")
    {
        PrefixTrie t;
        SnapEventRef a{0, SnapKind::Start}, b{0, SnapKind::End}, c{1, SnapKind::Start};
        CHECK(t.size() == 0);
        CHECK(t.insert({a, b}));
        CHECK_FALSE(t.insert({a, b}));
        CHECK(t.size() == 1);
        CHECK(t.forbids({a, b}));
        CHECK(t.forbids({a, b, c}));
        CHECK_FALSE(t.forbids({a}));
        CHECK_FALSE(t.forbids({a, c}));
        CHECK_FALSE(t.forbids({}));
        long at = t.step(PrefixTrie::root, a);
        CHECK(at >= 0);
        CHECK(t.step(at, b) == PrefixTrie::forbidden);
        CHECK(t.step(at, c) == PrefixTrie::off);
        CHECK(t.step(PrefixTrie::off, a) == PrefixTrie::off);
        CHECK(t.insert({c}));
        CHECK(t.forbids({c, a}));
    }
}

TEST_SUITE("plan search")
{
    TEST_CASE("goal already true: the empty plan")
    {
        TemporalPlanningProblem tp;
        tp.props = {"p"};
        tp.init = {true};
        tp.goal = {0};
        DurativeAction a;
        a.name = a.base_name = "a";
        a.dur_lo = 1;
        tp.actions = {a};
        auto out = plan(tp, PrefixTrie{}, PlannerConfig{});
        REQUIRE(out.status == PlanOutcome::Status::Found);
        CHECK(out.plan->events().empty());
    }

    TEST_CASE("running example with and without a learned prefix")
    {
        const auto& tp = factory().model.problem;
        auto out = plan(tp, PrefixTrie{}, PlannerConfig{});
        REQUIRE(out.status == PlanOutcome::Status::Found);
        CHECK(out.plan->events().size() == 6); // shortest first
        CHECK(out.plan->events().front() == ev(tp, "Process", SnapKind::Start));
        check_returned(tp, *out.plan);

        std::vector<SnapEventRef> bad{ev(tp, "Process", SnapKind::Start), ev(tp, "Work#1", SnapKind::Start),
                                      ev(tp, "Work#1", SnapKind::End), ev(tp, "Work#2", SnapKind::Start)};
        PrefixTrie trie;
        trie.insert(bad);
        auto next = plan(tp, trie, PlannerConfig{});
        REQUIRE(next.status == PlanOutcome::Status::Found);
        CHECK_FALSE(has_prefix(next.plan->events(), bad));
        check_returned(tp, *next.plan);
        CHECK(next.plan->events().size() > 6);
    }

    TEST_CASE("finds a plan iff exhaustive enumeration does, also under random tries")
    {
        test::Rng rng(12);
        test::RandomShape shape;
        int found = 0, exhausted = 0, pruned = 0;
        for (int i = 0; i < 150; ++i) {
            PampProblem p = test::random_pamp(rng, shape);
            const auto& tp = p.problem;
            PrefixTrie trie;
            if (i % 2) {
                // Forbid a few random prefixes of real plans.
                auto any = test::brute_force_plan(tp, 6);
                for (int k = 0; any && !any->empty() && k < 2; ++k) {
                    std::size_t len = std::uniform_int_distribution<std::size_t>(1, any->size())(rng);
                    trie.insert({any->begin(), any->begin() + static_cast<long>(len)});
                    any = test::brute_force_plan(tp, 6, [&](const auto& path) { return trie.forbids(path); });
                }
            }
            PlannerConfig cfg;
            cfg.max_path_len = 6;
            auto out = plan(tp, trie, cfg);
            auto oracle = test::brute_force_plan(tp, 6, [&](const auto& path) { return trie.forbids(path); });
            CAPTURE(i);
            REQUIRE(out.status != PlanOutcome::Status::BudgetExceeded);
            CHECK((out.status == PlanOutcome::Status::Found) == oracle.has_value());
            if (out.plan) {
                ++found;
                CHECK_FALSE(trie.forbids(out.plan->events()));
                // Iterative deepening returns a shortest plan.
                CHECK(out.plan->events().size() == oracle->size());
                check_returned(tp, *out.plan);
            } else {
                ++exhausted;
            }
            pruned += trie.size() > 0;

            cfg.strategy = SearchStrategy::Greedy;
            auto greedy = plan(tp, trie, cfg);
            CHECK((greedy.status == PlanOutcome::Status::Found) == oracle.has_value());
            if (greedy.plan) {
                CHECK_FALSE(trie.forbids(greedy.plan->events()));
                check_returned(tp, *greedy.plan);
            }
        }
        CHECK(found >= 20);
        CHECK(exhausted >= 20);
        CHECK(pruned >= 8);
    }

    TEST_CASE("a tiny budget is reported, not mistaken for exhaustion")
    {
        PlannerConfig cfg;
        cfg.node_budget = 3;
        auto out = plan(factory().model.problem, PrefixTrie{}, cfg);
        CHECK(out.status == PlanOutcome::Status::BudgetExceeded);
        CHECK_FALSE(out.plan);
    }

    TEST_CASE("search strategy names")
    {
        for (auto s : {SearchStrategy::IterativeDeepening, SearchStrategy::Greedy})
            CHECK(parse_search_strategy(to_string(s)) == s);
        CHECK_FALSE(parse_search_strategy("dfs"));
    }
}
