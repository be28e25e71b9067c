#include "natlog/machine.hpp"

#include <iostream>

namespace natlog {

// ---------------------------------------------------------------------------
// Seeds

std::vector<std::string> answer_names(const ParsedQuery& query) {
    std::vector<std::string> names;
    for (const auto& n : query.var_names)
        if (!n.empty() && n[0] != '_')
            names.push_back(n);
    return names;
}

EngineSeed seed_from_query(const ParsedQuery& query) {
    std::vector<Term> vars;
    for (VarId i = 0; i < query.nvars(); ++i) {
        const auto& n = query.var_names[i];
        if (!n.empty() && n[0] != '_')
            vars.emplace_back(Var{i});
    }
    return EngineSeed{Term::tuple(std::move(vars)), query.goals, query.nvars()};
}

EngineSeed seed_from_terms(const Term& answer_template, const Term& goal, const Store& store,
                           std::size_t depth_limit) {
    Term g = store.deref(goal);
    if (!g.is_tuple())
        g = Term::tuple({g});
    DetachedTerm d = detach(Term::tuple({answer_template, g}), store, depth_limit);
    return EngineSeed{d.term[0], {Goal{Marker::plain, d.term[1]}}, d.nvars};
}

std::string_view status_name(EngineStatus s) {
    switch (s) {
    case EngineStatus::ready: return "ready";
    case EngineStatus::running: return "running";
    case EngineStatus::suspended_at_answer: return "suspended_at_answer";
    case EngineStatus::suspended_at_yield: return "suspended_at_yield";
    case EngineStatus::done: return "done";
    case EngineStatus::stopped: return "stopped";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Continuations

struct Engine::ContNode {
    Goal goal;
    mutable Cont next;

    ContNode(Goal g, Cont n) : goal(std::move(g)), next(std::move(n)) {}

    // Long goal lists must not unwind recursively.
    ~ContNode() {
        Cont n = std::move(next);
        while (n && n.use_count() == 1) {
            Cont rest = std::move(n->next);
            n = std::move(rest);
        }
    }
};

Engine::Engine(Context ctx, EngineSeed seed) : ctx_(std::move(ctx)) {
    if (!ctx_.db)
        ctx_.db = std::make_shared<Db>();
    if (!ctx_.registry)
        ctx_.registry = std::make_shared<Registry>(default_registry());
    VarId base = store_.fresh_block(seed.nvars);
    template_ = shift(seed.answer_template, base);
    for (std::size_t i = seed.goals.size(); i-- > 0;)
        push_goal(Goal{seed.goals[i].marker, shift(seed.goals[i].term, base)});
}

Engine::~Engine() { release(); }

void Engine::release() {
    while (!cps_.empty())
        cps_.pop_back();
    cont_.reset();
    store_ = Store();
    template_ = Term();
    pending_yield_ = Term();
}

void Engine::stop() {
    if (status_ == EngineStatus::running)
        throw Error("an engine cannot stop itself while running");
    status_ = EngineStatus::stopped;
    release();
}

std::ostream& Engine::out() const { return ctx_.out ? *ctx_.out : std::cout; }
std::ostream& Engine::err() const { return ctx_.err ? *ctx_.err : std::cerr; }

void Engine::push_goal(Goal goal) { cont_ = std::make_shared<const ContNode>(std::move(goal), std::move(cont_)); }

void Engine::push_choicepoint(Choicepoint cp) {
    cps_.push_back(std::move(cp));
    if (cps_.size() > max_cp_depth_)
        max_cp_depth_ = cps_.size();
}

bool Engine::unify_terms(const Term& a, const Term& b) { return unify(a, b, store_, ctx_.options.occurs_check); }

std::vector<Term> Engine::resolved_args(const Term& goal, std::size_t from, std::size_t to) const {
    std::vector<Term> args;
    args.reserve(to > from ? to - from : 0);
    for (std::size_t i = from; i < to; ++i)
        args.push_back(resolve(goal[i], store_, ctx_.options.depth_limit));
    return args;
}

HostCall Engine::host_call(std::string_view name, std::span<const Term> args) {
    return HostCall{name, args, store_, out(), err()};
}

// ---------------------------------------------------------------------------
// Main loop

AnswerEvent Engine::next() {
    switch (status_) {
    case EngineStatus::done:
    case EngineStatus::stopped: return AnswerEvent{};
    case EngineStatus::running: throw Error("an engine cannot ask itself");
    default: break;
    }
    const bool failing = status_ == EngineStatus::suspended_at_answer;
    try {
        return run(failing);
    } catch (const std::exception& e) {
        status_ = EngineStatus::done;
        release();
        return AnswerEvent{AnswerEvent::Kind::error, {}, e.what()};
    }
}

AnswerEvent Engine::run(bool failing) {
    status_ = EngineStatus::running;
    const auto* interrupt = ctx_.options.interrupt;
    for (;;) {
        if (interrupt && interrupt->load(std::memory_order_relaxed))
            throw Error("interrupted");
        if (failing) {
            if (!backtrack()) {
                status_ = EngineStatus::done;
                release();
                return AnswerEvent{};
            }
            failing = false;
            continue;
        }
        if (!cont_) {
            status_ = EngineStatus::suspended_at_answer;
            return AnswerEvent{AnswerEvent::Kind::answer, detach(template_, store_, ctx_.options.depth_limit), {}};
        }
        Goal g = cont_->goal;
        cont_ = cont_->next;
        switch (execute(g)) {
        case Step::proceed: break;
        case Step::fail: failing = true; break;
        case Step::yield: {
            status_ = EngineStatus::suspended_at_yield;
            AnswerEvent ev{AnswerEvent::Kind::yielded, detach(pending_yield_, store_, ctx_.options.depth_limit), {}};
            pending_yield_ = Term();
            return ev;
        }
        }
    }
}

bool Engine::backtrack() {
    while (!cps_.empty()) {
        Choicepoint& cp = cps_.back();
        store_.undo_to(cp.mark);
        cont_ = cp.cont;
        if (auto* alts = std::get_if<ClauseAlts>(&cp.alts)) {
            const Clause* clause = alts->candidates[alts->next];
            Term goal = alts->goal;
            std::size_t after = next_match(goal, alts->candidates, alts->next + 1);
            if (after == alts->candidates.size())
                cps_.pop_back();
            else
                alts->next = after;
            if (resolve_with(*clause, goal))
                return true;
        } else {
            auto& gen = std::get<GenAlts>(cp.alts);
            std::optional<Term> value = (*gen.gen)();
            if (!value) {
                cps_.pop_back();
                continue;
            }
            if (unify_terms(gen.target, *value))
                return true;
        }
    }
    return false;
}

std::size_t Engine::next_match(const Term& goal, std::span<const Clause* const> cands, std::size_t from) const {
    const std::size_t n = goal.arity();
    for (std::size_t i = from; i < cands.size(); ++i) {
        const Term& head = cands[i]->head;
        if (head.arity() != n)
            continue;
        bool compatible = true;
        for (std::size_t k = 0; k < n && compatible; ++k) {
            const Term& h = head[k];
            if (h.is_var())
                continue;
            Term g = store_.deref(goal[k]);
            if (g.is_var())
                continue;
            if (g.kind() != h.kind())
                compatible = false;
            else if (g.is_atomic())
                compatible = g == h;
            else if (g.is_tuple())
                compatible = g.arity() == h.arity();
        }
        if (compatible)
            return i;
    }
    return cands.size();
}

bool Engine::resolve_with(const Clause& clause, const Term& goal) {
    VarId base = store_.fresh_block(clause.nvars);
    if (!unify_terms(shift(clause.head, base), goal))
        return false;
    for (std::size_t i = clause.body.size(); i-- > 0;)
        push_goal(Goal{clause.body[i].marker, shift(clause.body[i].term, base)});
    return true;
}

// ---------------------------------------------------------------------------
// Goal dispatch

Engine::Step Engine::execute(const Goal& goal) {
    if (ctx_.options.trace)
        err() << "[trace] " << marker_prefix(goal.marker) << render(goal.term, store_, ctx_.options.depth_limit)
              << '\n';
    Term t = store_.deref(goal.term);
    if (!t.is_tuple())
        t = Term::tuple({t});
    switch (goal.marker) {
    case Marker::plain: return call_plain(t);
    case Marker::fn: return call_fn(t);
    case Marker::gen: return call_gen(t);
    case Marker::effect: return call_effect(t);
    case Marker::yield: return call_yield(t);
    case Marker::terminal: break;
    }
    throw Error("@ terminal outside a grammar rule");
}

Engine::Step Engine::call_plain(const Term& goal) {
    if (goal.arity() == 0)
        return Step::proceed;
    if (goal.arity() == 1) {
        Term inner = store_.deref(goal[0]);
        if (inner.is_var())
            throw Error("unbound goal");
        if (inner.is_tuple())
            return call_plain(inner);
    }
    if (auto step = call_native(goal))
        return *step;
    return call_clauses(goal);
}

Engine::Step Engine::call_clauses(const Term& goal) {
    auto cands = ctx_.db->candidates(goal, store_);
    std::size_t first = next_match(goal, cands, 0);
    if (first == cands.size()) {
        if (cands.empty() && !ctx_.options.undefined_fails) {
            Term lead = store_.deref(goal[0]);
            throw Error("undefined: " + (lead.is_text() ? lead.as_text().str() : render(lead, store_)) + "/" +
                        std::to_string(goal.arity()));
        }
        return Step::fail;
    }
    std::size_t second = next_match(goal, cands, first + 1);
    if (second != cands.size())
        push_choicepoint(Choicepoint{cont_, store_.mark(), ClauseAlts{goal, cands, second}});
    return resolve_with(*cands[first], goal) ? Step::proceed : Step::fail;
}

namespace {

std::shared_ptr<EngineObject> engine_arg(const Term& t, const Store& store, std::string_view who) {
    auto e = host_cast<EngineObject>(store.deref(t));
    if (!e)
        throw Error("type error in " + std::string(who) + ": expected an engine, got " + render(t, store));
    return e;
}

bool is_name(const Term& lead, std::string_view name) { return lead.is_text(name); }

} // namespace

std::optional<Engine::Step> Engine::call_native(const Term& goal) {
    Term lead = store_.deref(goal[0]);
    if (!lead.is_text())
        return std::nullopt;
    const std::size_t n = goal.arity();
    auto ok = [](bool b) { return b ? Step::proceed : Step::fail; };

    if (n == 1 && is_name(lead, "true"))
        return Step::proceed;
    if (n == 1 && (is_name(lead, "fail") || is_name(lead, "false")))
        return Step::fail;
    if (n == 3 && is_name(lead, "eq"))
        return ok(unify_terms(goal[1], goal[2]));
    if (n == 3 && is_name(lead, "distinct"))
        return ok(!identical(goal[1], goal[2], store_));
    if (n >= 2 && is_name(lead, "call")) {
        Term g = store_.deref(goal[1]);
        std::vector<Term> items;
        if (g.is_tuple())
            items.assign(g.items().begin(), g.items().end());
        else if (g.is_text())
            items.push_back(g);
        else
            throw Error("type error in call: expected a goal, got " + render(g, store_));
        for (std::size_t i = 2; i < n; ++i)
            items.push_back(goal[i]);
        push_goal(Goal{Marker::plain, Term::tuple(std::move(items))});
        return Step::proceed;
    }
    if (n == 2 && is_name(lead, "not")) {
        Term g = store_.deref(goal[1]);
        if (!g.is_tuple() && !g.is_text())
            throw Error("type error in not: expected a goal, got " + render(g, store_));
        Engine child(ctx_, seed_from_terms(Term(), g, store_, ctx_.options.depth_limit));
        for (;;) {
            AnswerEvent ev = child.next();
            if (ev.is_error())
                throw Error(ev.message);
            if (ev.is_answer())
                return Step::fail;
            if (ev.is_exhausted())
                return Step::proceed;
        }
    }
    if (n == 4 && is_name(lead, "findall")) {
        Term g = store_.deref(goal[2]);
        if (!g.is_tuple() && !g.is_text())
            throw Error("type error in findall: expected a goal, got " + render(g, store_));
        Engine child(ctx_, seed_from_terms(goal[1], g, store_, ctx_.options.depth_limit));
        std::vector<Term> found;
        for (;;) {
            AnswerEvent ev = child.next();
            if (ev.is_error())
                throw Error(ev.message);
            if (ev.is_exhausted())
                break;
            if (ev.is_answer())
                found.push_back(attach(ev.term, store_));
        }
        return ok(unify_terms(goal[3], tuple_to_cons(found)));
    }
    if (n == 3 && is_name(lead, "type"))
        return ok(unify_terms(goal[2], Term::text(term_type(goal[1], store_))));
    if (n == 1 && is_name(lead, "nl")) {
        out() << '\n';
        return Step::proceed;
    }
    if (is_name(lead, "print") || is_name(lead, "writeln")) {
        auto args = resolved_args(goal, 1, n);
        out() << (is_name(lead, "print") ? print_text(args, store_) : writeln_text(args, store_)) << '\n';
        return Step::proceed;
    }
    if (n >= 4 && is_name(lead, "with")) {
        WithResult r = eval_with(goal.items(), store_);
        return ok(unify_terms(r.target, number_term(r.value)));
    }
    if (n >= 4 && is_name(lead, "when"))
        return ok(eval_when(goal.items(), store_));
    if (n == 4 && is_name(lead, "eng")) {
        auto child = std::make_unique<Engine>(ctx_, seed_from_terms(goal[1], goal[2], store_, ctx_.options.depth_limit));
        return ok(unify_terms(goal[3], Term::host(std::make_shared<EngineObject>(std::move(child)))));
    }
    if (n == 3 && is_name(lead, "ask")) {
        auto e = engine_arg(goal[1], store_, "ask");
        AnswerEvent ev = e->next();
        if (ev.is_error())
            throw Error(ev.message);
        if (ev.is_exhausted())
            return ok(unify_terms(goal[2], Term::text("no")));
        return ok(unify_terms(goal[2], Term::tuple({Term::text("the"), attach(ev.term, store_)})));
    }
    if (n == 2 && is_name(lead, "stop")) {
        engine_arg(goal[1], store_, "stop")->stop();
        return Step::proceed;
    }
    return std::nullopt;
}

namespace {

std::string host_name(const Term& goal, const Store& store, std::string_view marker) {
    if (goal.arity() == 0)
        throw Error("empty " + std::string(marker) + " call");
    Term lead = store.deref(goal[0]);
    if (!lead.is_text())
        throw Error("type error: host call name must be a constant, got " + render(lead, store));
    return lead.as_text().str();
}

} // namespace

Engine::Step Engine::call_fn(const Term& goal) {
    std::string name = host_name(goal, store_, "`");
    const auto* entry = ctx_.registry->fn(name);
    if (!entry)
        throw Error("unknown host function: " + name);
    if (goal.arity() < 2)
        throw Error("function " + name + " needs an output argument");
    check_arity("function", name, entry->arity, goal.arity() - 2);
    auto args = resolved_args(goal, 1, goal.arity() - 1);
    std::optional<Term> result = entry->call(host_call(name, args));
    if (!result)
        return Step::fail;
    return unify_terms(goal[goal.arity() - 1], *result) ? Step::proceed : Step::fail;
}

Engine::Step Engine::call_gen(const Term& goal) {
    std::string name = host_name(goal, store_, "``");
    const auto* entry = ctx_.registry->gen(name);
    if (!entry)
        throw Error("unknown host generator: " + name);
    if (goal.arity() < 2)
        throw Error("generator " + name + " needs an output argument");
    check_arity("generator", name, entry->arity, goal.arity() - 2);
    auto args = resolved_args(goal, 1, goal.arity() - 1);
    auto gen = std::make_shared<HostGenerator>(entry->call(host_call(name, args)));
    // the choicepoint produces the first value on the immediate backtrack
    push_choicepoint(Choicepoint{cont_, store_.mark(), GenAlts{std::move(gen), goal[goal.arity() - 1]}});
    return Step::fail;
}

Engine::Step Engine::call_effect(const Term& goal) {
    std::string name = host_name(goal, store_, "#");
    const auto* entry = ctx_.registry->effect(name);
    if (!entry)
        throw Error("unknown host effect: " + name);
    check_arity("effect", name, entry->arity, goal.arity() - 1);
    auto args = resolved_args(goal, 1, goal.arity());
    entry->call(host_call(name, args));
    return Step::proceed;
}

Engine::Step Engine::call_yield(const Term& goal) {
    if (goal.arity() == 0)
        throw Error("empty yield");
    if (store_.deref(goal[0]).is_text("trust")) {
        if (goal.arity() == 1)
            throw Error("^trust needs a goal");
        Term next_goal = Term::tuple({goal.items().begin() + 1, goal.items().end()});
        cps_.clear();
        // keep only what the new goal and the template can reach
        DetachedTerm live = detach(Term::tuple({template_, next_goal}), store_, ctx_.options.depth_limit);
        cont_.reset();
        store_ = Store();
        Term fresh = attach(live, store_);
        template_ = fresh[0];
        push_goal(Goal{Marker::plain, fresh[1]});
        return Step::proceed;
    }
    pending_yield_ = goal.arity() == 1 ? goal[0] : goal;
    return Step::yield;
}

// ---------------------------------------------------------------------------
// Engine handles

AnswerEvent EngineObject::next() { return engine_ ? engine_->next() : AnswerEvent{}; }

void EngineObject::stop() {
    if (engine_)
        engine_->stop();
}

EngineTable::Handle EngineTable::create(Context ctx, EngineSeed seed) {
    Handle h = next_handle_++;
    engines_.emplace(h, std::make_unique<Engine>(std::move(ctx), std::move(seed)));
    return h;
}

AnswerEvent EngineTable::next(Handle h) {
    auto it = engines_.find(h);
    return it == engines_.end() ? AnswerEvent{} : it->second->next();
}

void EngineTable::stop(Handle h) {
    auto it = engines_.find(h);
    if (it == engines_.end())
        return;
    it->second->stop();
    engines_.erase(it);
}

// ---------------------------------------------------------------------------
// Query streams

AnswerStream::AnswerStream(Context ctx, const ParsedQuery& query)
    : names_(answer_names(query)), engine_(std::move(ctx), seed_from_query(query)) {}

std::optional<QueryEvent> AnswerStream::next() {
    AnswerEvent ev = engine_.next();
    switch (ev.kind) {
    case AnswerEvent::Kind::exhausted: return std::nullopt;
    case AnswerEvent::Kind::error: throw Error(ev.message);
    case AnswerEvent::Kind::yielded: return QueryEvent{true, {}, ev.term.term};
    case AnswerEvent::Kind::answer: break;
    }
    QueryEvent out;
    for (std::size_t i = 0; i < names_.size(); ++i)
        out.bindings.emplace_back(names_[i], ev.term.term[i]);
    return out;
}

AnswerStream solve(Context ctx, const ParsedQuery& query) { return AnswerStream(std::move(ctx), query); }

std::string format_event(const QueryEvent& e) {
    if (e.yielded)
        return "YIELD: " + render(e.value);
    std::string s = "ANSWER: {";
    for (std::size_t i = 0; i < e.bindings.size(); ++i) {
        if (i)
            s += ", ";
        s += quote_text(e.bindings[i].first);
        s += ": ";
        s += render(e.bindings[i].second);
    }
    s += '}';
    return s;
}

} // namespace natlog
