#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "natlog/builtins.hpp"
#include "natlog/database.hpp"
#include "natlog/reader.hpp"
#include "natlog/terms.hpp"

namespace natlog {

struct Options {
    bool occurs_check = false;
    // Calls to predicates with no clauses fail instead of raising an error.
    bool undefined_fails = false;
    // Echoes every executed goal to the error stream.
    bool trace = false;
    std::size_t depth_limit = default_depth_limit;
    // Polled between resolution steps; when set the running query stops
    // with an "interrupted" error. Sessions clear it before each query.
    std::atomic<bool>* interrupt = nullptr;
};

// Everything an engine shares with its parent and children.
struct Context {
    std::shared_ptr<const Db> db;
    std::shared_ptr<const Registry> registry;
    Options options;
    std::ostream* out = nullptr;  // effects; null means std::cout
    std::ostream* err = nullptr;  // trace and browse; null means std::cerr
};

// Goals plus the answer template, detached: variables 0..nvars-1.
struct EngineSeed {
    Term answer_template;
    std::vector<Goal> goals;
    std::uint32_t nvars = 0;
};

// Template is the tuple of the query's named variables, in order of first
// occurrence; names starting with '_' are left out.
EngineSeed seed_from_query(const ParsedQuery& query);
std::vector<std::string> answer_names(const ParsedQuery& query);

// `eng Template Goal E`: one copy of both so shared variables stay shared.
EngineSeed seed_from_terms(const Term& answer_template, const Term& goal, const Store& store,
                           std::size_t depth_limit = default_depth_limit);

struct AnswerEvent {
    enum class Kind { answer, yielded, exhausted, error };

    Kind kind = Kind::exhausted;
    // A copy sharing no variables with the producing engine.
    DetachedTerm term;
    std::string message;

    bool is_answer() const { return kind == Kind::answer; }
    bool is_yield() const { return kind == Kind::yielded; }
    bool is_exhausted() const { return kind == Kind::exhausted; }
    bool is_error() const { return kind == Kind::error; }
};

enum class EngineStatus { ready, running, suspended_at_answer, suspended_at_yield, done, stopped };

std::string_view status_name(EngineStatus s);

class Engine {
public:
    Engine(Context ctx, EngineSeed seed);
    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;
    ~Engine();

    // Runs until the next answer, yield, exhaustion or error. After done or
    // stopped every call returns exhausted. An error leaves the engine done.
    AnswerEvent next();
    // Idempotent; releases the goal stack, choicepoints and store.
    void stop();

    EngineStatus status() const { return status_; }

    std::size_t choicepoint_count() const { return cps_.size(); }
    std::size_t max_choicepoint_depth() const { return max_cp_depth_; }
    std::size_t trail_size() const { return store_.trail_size(); }
    std::size_t cell_count() const { return store_.cell_count(); }

    const Context& context() const { return ctx_; }

private:
    struct ContNode;
    using Cont = std::shared_ptr<const ContNode>;

    struct ClauseAlts {
        Term goal;
        std::span<const Clause* const> candidates;
        std::size_t next;
    };
    struct GenAlts {
        std::shared_ptr<HostGenerator> gen;
        Term target;
    };
    struct Choicepoint {
        Cont cont;
        TrailMark mark;
        std::variant<ClauseAlts, GenAlts> alts;
    };

    enum class Step { proceed, fail, yield };

    AnswerEvent run(bool failing);
    bool backtrack();
    Step execute(const Goal& goal);
    Step call_plain(const Term& goal);
    std::optional<Step> call_native(const Term& goal);
    Step call_clauses(const Term& goal);
    Step call_fn(const Term& goal);
    Step call_gen(const Term& goal);
    Step call_effect(const Term& goal);
    Step call_yield(const Term& goal);

    bool resolve_with(const Clause& clause, const Term& goal);
    std::size_t next_match(const Term& goal, std::span<const Clause* const> cands, std::size_t from) const;
    void push_choicepoint(Choicepoint cp);
    void push_goal(Goal goal);
    bool unify_terms(const Term& a, const Term& b);
    std::vector<Term> resolved_args(const Term& goal, std::size_t from, std::size_t to) const;
    HostCall host_call(std::string_view name, std::span<const Term> args);
    std::ostream& out() const;
    std::ostream& err() const;
    void release();

    Context ctx_;
    Store store_;
    Term template_;
    Term pending_yield_;
    Cont cont_;
    std::vector<Choicepoint> cps_;
    EngineStatus status_ = EngineStatus::ready;
    std::size_t max_cp_depth_ = 0;
};

// Engine handle as seen by Natlog programs.
class EngineObject final : public HostObject {
public:
    explicit EngineObject(std::unique_ptr<Engine> engine) : engine_(std::move(engine)) {}
    std::string_view kind_name() const override { return "engine"; }

    AnswerEvent next();
    void stop();

private:
    std::unique_ptr<Engine> engine_;
};

// Handle-based engine API for embedders.
class EngineTable {
public:
    using Handle = std::uint64_t;

    Handle create(Context ctx, EngineSeed seed);
    // Unknown or stopped handles answer exhausted.
    AnswerEvent next(Handle h);
    void stop(Handle h);

    bool contains(Handle h) const { return engines_.contains(h); }
    std::size_t size() const { return engines_.size(); }

private:
    std::map<Handle, std::unique_ptr<Engine>> engines_;
    Handle next_handle_ = 1;
};

// One element of a query's answer stream.
struct QueryEvent {
    bool yielded = false;
    // For answers: (name, value) in template order. For yields: empty.
    std::vector<std::pair<std::string, Term>> bindings;
    // For yields: the yielded term.
    Term value;
};

// Lazy stream over a query's answers; each next() does only the work needed
// to produce one more element.
class AnswerStream {
public:
    AnswerStream(Context ctx, const ParsedQuery& query);

    // nullopt once exhausted; throws Error when the query raises one.
    std::optional<QueryEvent> next();

    Engine& engine() { return engine_; }

private:
    std::vector<std::string> names_;
    Engine engine_;
};

AnswerStream solve(Context ctx, const ParsedQuery& query);

// ANSWER: {'X': 1}  /  YIELD: t
std::string format_event(const QueryEvent& e);

} // namespace natlog
