#include "pamp/smt.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <set>
#include <sstream>

namespace pamp::smt
{

std::string_view to_string(Result::Status s)
{
    switch (s) {
    case Result::Status::Sat:
        return "sat";
    case Result::Status::Unsat:
        return "unsat";
    case Result::Status::Unknown:
        return "unknown";
    }
    return "unknown";
}

ProcessOutput run_process(const std::string& command, const std::string& input, double timeout_seconds)
{
    int in_pipe[2], out_pipe[2], err_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
        throw std::runtime_error(std::string("pipe failed: ") + std::strerror(errno));

    pid_t pid = fork();
    if (pid < 0)
        throw std::runtime_error(std::string("fork failed: ") + std::strerror(errno));
    if (pid == 0) {
        setpgid(0, 0);
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]})
            close(fd);
        std::string cmd = "exec " + command;
        execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    setpgid(pid, pid);
    close(in_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[1]);
    for (int fd : {in_pipe[1], out_pipe[0], err_pipe[0]})
        fcntl(fd, F_SETFL, fcntl(fd, F_GETFL) | O_NONBLOCK);

    // A closed read end must not kill us with SIGPIPE.
    struct sigaction ignore{}, previous{};
    ignore.sa_handler = SIG_IGN;
    sigaction(SIGPIPE, &ignore, &previous);

    ProcessOutput result;
    auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_seconds);
    std::size_t written = 0;
    int in_fd = in_pipe[1];
    if (input.empty()) {
        close(in_fd);
        in_fd = -1;
    }
    int out_fd = out_pipe[0];
    int err_fd = err_pipe[0];
    char buf[65536];
    while (out_fd >= 0 || err_fd >= 0) {
        auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            result.timed_out = true;
            break;
        }
        int wait_ms = static_cast<int>(
            std::min<long long>(1000, std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count() + 1));
        std::vector<pollfd> fds;
        if (in_fd >= 0)
            fds.push_back({in_fd, POLLOUT, 0});
        if (out_fd >= 0)
            fds.push_back({out_fd, POLLIN, 0});
        if (err_fd >= 0)
            fds.push_back({err_fd, POLLIN, 0});
        int rc = poll(fds.data(), fds.size(), wait_ms);
        if (rc < 0 && errno != EINTR)
            break;
        for (const auto& p : fds) {
            if (!p.revents)
                continue;
            if (p.fd == in_fd) {
                ssize_t n = write(in_fd, input.data() + written, input.size() - written);
                if (n > 0)
                    written += static_cast<std::size_t>(n);
                if (n < 0 && errno != EAGAIN && errno != EINTR)
                    written = input.size();
                if (written >= input.size()) {
                    close(in_fd);
                    in_fd = -1;
                }
            } else {
                ssize_t n = read(p.fd, buf, sizeof buf);
                if (n > 0) {
                    (p.fd == out_fd ? result.out : result.err).append(buf, static_cast<std::size_t>(n));
                } else if (n == 0 || (errno != EAGAIN && errno != EINTR)) {
                    close(p.fd);
                    (p.fd == out_fd ? out_fd : err_fd) = -1;
                }
            }
        }
    }
    if (result.timed_out)
        kill(-pid, SIGKILL);
    for (int fd : {in_fd, out_fd, err_fd})
        if (fd >= 0)
            close(fd);
    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    sigaction(SIGPIPE, &previous, nullptr);
    result.exit_status = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
    return result;
}

Result check(const Term& t, const std::vector<Term>& query, const SolverConfig& cfg)
{
    Result r;
    r.solver_calls = 1;
    if (t->op == Op::BoolConst) {
        r.status = t->bval ? Result::Status::Sat : Result::Status::Unsat;
        for (const auto& v : query)
            r.model.set(v->name, v->sort == Sort::Bool ? Value{false} : Value{Rational{0}});
        r.solver_calls = 0;
        return r;
    }
    std::string script = emit_smtlib(t, &query);
    ProcessOutput out = run_process(cfg.command, script, cfg.timeout_seconds);
    if (out.timed_out) {
        r.reason = "timeout";
        return r;
    }
    std::istringstream is(out.out);
    std::string first;
    std::getline(is, first);
    while (!first.empty() && std::isspace(static_cast<unsigned char>(first.back())))
        first.pop_back();
    if (first == "unsat") {
        r.status = Result::Status::Unsat;
        return r;
    }
    if (first == "unknown") {
        r.reason = "solver answered unknown";
        return r;
    }
    if (first != "sat") {
        r.reason = "solver failure (exit " + std::to_string(out.exit_status) + "): " + out.out.substr(0, 400) +
                   out.err.substr(0, 400);
        return r;
    }
    std::string rest((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    try {
        r.model = query.empty() ? Model{} : parse_model(rest);
    } catch (const ProtocolError& e) {
        r.reason = std::string(e.what()) + ": " + e.raw().substr(0, 400);
        return r;
    }
    for (const auto& v : query)
        if (!r.model.has(v->name)) {
            r.reason = "model is missing '" + v->name + "'";
            return r;
        }
    r.status = Result::Status::Sat;
    return r;
}

Term ExistsForall::to_term() const { return mk_and(outer, mk_forall(universals, body)); }

namespace
{

std::vector<Term> existential_vars(const ExistsForall& q)
{
    std::map<std::string, Term> all;
    for (const auto& v : free_vars(q.outer))
        all.emplace(v->name, v);
    std::set<std::string> uni;
    for (const auto& v : q.universals)
        uni.insert(v->name);
    for (const auto& v : free_vars(q.body))
        if (!uni.count(v->name))
            all.emplace(v->name, v);
    std::vector<Term> out;
    for (auto& [n, v] : all)
        out.push_back(v);
    return out;
}

// Rewrites a counterexample value as an existential term with the same
// current value: the existential variable (or difference of two) that it
// equals under the candidate, plus a constant offset otherwise. Instances
// built this way track the candidate when it moves.
Term generalize(const Rational& v, const std::vector<std::pair<Term, Rational>>& reals)
{
    for (const auto& [e, c] : reals)
        if (c == v)
            return e;
    for (const auto& [e1, c1] : reals)
        for (const auto& [e2, c2] : reals)
            if (e1 != e2 && c1 - c2 == v)
                return mk_sub(e1, e2);
    const Term* best = nullptr;
    Rational best_gap;
    for (const auto& [e, c] : reals) {
        Rational gap = v - c;
        if (gap >= 0 && (!best || gap < best_gap)) {
            best = &e;
            best_gap = gap;
        }
    }
    if (best)
        return mk_add(*best, mk_real(best_gap));
    return mk_real(v);
}

Result cegis(const ExistsForall& q, const SolverConfig& cfg, bool generalize_instances)
{
    Result r;
    auto evars = existential_vars(q);
    std::vector<Term> instances;
    std::set<std::string> seen_instances;
    for (int round = 0; round < cfg.cegis_rounds; ++round) {
        Term candidate_query = mk_and(q.outer, mk_and(instances));
        Result cand = check(candidate_query, evars, cfg);
        r.solver_calls += cand.solver_calls;
        if (cand.status != Result::Status::Sat) {
            r.status = cand.status;
            r.reason = cand.reason;
            return r;
        }
        Term negated = mk_not(substitute_model(q.body, cand.model));
        Result ce = check(negated, q.universals, cfg);
        r.solver_calls += ce.solver_calls;
        if (ce.unsat()) {
            r.status = Result::Status::Sat;
            r.model = cand.model;
            return r;
        }
        if (!ce.sat()) {
            r.reason = "counterexample query: " + ce.reason;
            return r;
        }
        std::vector<std::pair<Term, Rational>> reals;
        for (const auto& e : evars)
            if (e->sort == Sort::Real)
                reals.emplace_back(e, cand.model.get_real(e->name));
        std::unordered_map<std::string, Term> inst_map;
        for (const auto& u : q.universals) {
            const Value& v = ce.model.get(u->name);
            bool keep_ground = std::find(q.ground.begin(), q.ground.end(), u->name) != q.ground.end();
            if (std::holds_alternative<bool>(v))
                inst_map[u->name] = mk_bool(std::get<bool>(v));
            else
                inst_map[u->name] = generalize_instances && !keep_ground ? generalize(std::get<Rational>(v), reals)
                                                                         : mk_real(std::get<Rational>(v));
        }
        Term inst = substitute(q.body, inst_map);
        std::string key = to_smtlib(inst);
        if (!seen_instances.insert(key).second) {
            // The generalized instance did not exclude the candidate; fall
            // back to the ground counterexample, which always does.
            std::unordered_map<std::string, Term> ground;
            for (const auto& u : q.universals) {
                const Value& v = ce.model.get(u->name);
                ground[u->name] = std::holds_alternative<bool>(v) ? mk_bool(std::get<bool>(v))
                                                                   : mk_real(std::get<Rational>(v));
            }
            inst = substitute(q.body, ground);
            seen_instances.insert(to_smtlib(inst));
        }
        instances.push_back(inst);
    }
    r.reason = "cegis round budget exhausted";
    return r;
}

} // namespace

std::string_view to_string(Strategy s)
{
    switch (s) {
    case Strategy::NativeQuantifier:
        return "native";
    case Strategy::Cegis:
        return "cegis";
    case Strategy::Auto:
        return "auto";
    }
    return "auto";
}

std::optional<Strategy> parse_strategy(std::string_view s)
{
    for (Strategy x : {Strategy::NativeQuantifier, Strategy::Cegis, Strategy::Auto})
        if (to_string(x) == s)
            return x;
    return std::nullopt;
}

Result solve(const ExistsForall& q, const SolverConfig& cfg)
{
    Result r;
    auto evars = existential_vars(q);
    std::size_t warmup_calls = 0;
    if (cfg.strategy == Strategy::Auto) {
        SolverConfig short_cfg = cfg;
        short_cfg.cegis_rounds = cfg.warmup_rounds;
        r = cegis(q, short_cfg, true);
        warmup_calls = r.solver_calls;
        if (r.status == Result::Status::Unknown && r.reason == "cegis round budget exhausted") {
            SolverConfig native = cfg;
            native.strategy = Strategy::NativeQuantifier;
            r = solve(q, native);
            r.solver_calls += warmup_calls;
        }
    } else if (cfg.strategy == Strategy::NativeQuantifier) {
        r = check(q.to_term(), evars, cfg);
        if (r.status == Result::Status::Unknown && cfg.fallback && r.reason != "timeout") {
            std::size_t calls = r.solver_calls;
            r = cegis(q, cfg, true);
            r.solver_calls += calls;
        }
    } else {
        r = cegis(q, cfg, true);
    }
    if (r.sat()) {
        try {
            if (!evaluate_bool(q.outer, r.model)) {
                r.status = Result::Status::Unknown;
                r.reason = "solver model violates the quantifier-free part";
            }
        } catch (const EvalError& e) {
            r.status = Result::Status::Unknown;
            r.reason = std::string("model check failed: ") + e.what();
        }
    }
    return r;
}

} // namespace pamp::smt
