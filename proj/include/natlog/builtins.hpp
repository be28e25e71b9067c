#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "natlog/completer.hpp"
#include "natlog/terms.hpp"

namespace natlog {

// ---------------------------------------------------------------------------
// Host objects

class HostList final : public HostObject {
public:
    HostList() = default;
    explicit HostList(std::vector<Term> items) : items(std::move(items)) {}
    std::string_view kind_name() const override { return "list"; }

    std::vector<Term> items;
};

// Insertion-ordered map keyed by structural equality.
class HostMap final : public HostObject {
public:
    std::string_view kind_name() const override { return "map"; }
    void render(std::string& out, const std::function<void(const Term&)>& element) const override;

    const Term* find(const Term& key) const;
    void put(Term key, Term value);
    std::size_t size() const { return entries_.size(); }

private:
    std::vector<std::pair<Term, Term>> entries_;
};

class PropBag final : public HostObject {
public:
    std::string_view kind_name() const override { return "propbag"; }

    const Term* get(std::string_view name) const;
    void set(std::string name, Term value);

private:
    std::vector<std::pair<std::string, Term>> props_;
};

template <class T>
std::shared_ptr<T> host_cast(const Term& t) {
    if (!t.is_host())
        return nullptr;
    return std::dynamic_pointer_cast<T>(t.as_host());
}

// ---------------------------------------------------------------------------
// Registry

// Arguments are fully resolved against the calling engine's store.
struct HostCall {
    std::string_view name;
    std::span<const Term> args;
    Store& store;
    std::ostream& out;
    std::ostream& log;
};

enum class HostKind { fn, gen, effect };

// `` ` ``: N inputs, result unified with the goal's last argument; nullopt fails.
using HostFn = std::function<std::optional<Term>(const HostCall&)>;
// ``` `` ```: N inputs, one output per backtrack; nullopt ends the series.
using HostGenerator = std::function<std::optional<Term>()>;
using HostGen = std::function<HostGenerator(const HostCall&)>;
// `#`: N inputs, succeeds once.
using HostEffect = std::function<void(const HostCall&)>;

inline constexpr int any_arity = -1;

template <class F>
struct HostEntry {
    int arity;  // inputs only; any_arity accepts every count
    F call;
};

class Registry {
public:
    // Registering an existing name of the same kind replaces it.
    void add_fn(std::string name, int arity, HostFn fn);
    void add_gen(std::string name, int arity, HostGen gen);
    void add_effect(std::string name, int arity, HostEffect effect);

    const HostEntry<HostFn>* fn(std::string_view name) const;
    const HostEntry<HostGen>* gen(std::string_view name) const;
    const HostEntry<HostEffect>* effect(std::string_view name) const;

    std::vector<std::string> names(HostKind kind) const;

private:
    std::map<std::string, HostEntry<HostFn>, std::less<>> fns_;
    std::map<std::string, HostEntry<HostGen>, std::less<>> gens_;
    std::map<std::string, HostEntry<HostEffect>, std::less<>> effects_;
};

// fns: len, arg, dict, list, split, join, to_list, to_cons_list,
// from_cons_list_as_tuple, to_tuple, meth_call, getprop, getattr, propbag,
// type, complete, paint, analogy_prompt; gens: range; effects: print,
// writeln, nl, browse, setprop, setattr, meth_call. A null completer means MockCompleter.
Registry default_registry(std::shared_ptr<Completer> completer = nullptr);

// Throws Error naming the call when the input count does not match.
void check_arity(std::string_view kind, std::string_view name, int expected, std::size_t got);

// ---------------------------------------------------------------------------
// Arithmetic: `with E as V` and `when L op R`

using Number = std::variant<std::int64_t, double>;

Term number_term(Number n);

// Infix expression over numbers, bound variables, parenthesized groups and
// + - * / // mod; * / // mod bind tighter, all left associative.
Number evaluate(std::span<const Term> expr, const Store& store);

struct WithResult {
    Number value;
    Term target;
};

// goal = (with E... as V)
WithResult eval_with(std::span<const Term> goal, const Store& store);
// goal = (when L... op R...), op one of > < >= <= == !=
bool eval_when(std::span<const Term> goal, const Store& store);

// ---------------------------------------------------------------------------
// Output helpers shared by the effect builtins

// Arguments displayed and joined by single spaces.
std::string print_text(std::span<const Term> args, const Store& store);
// A single tuple or list argument prints as its space-joined elements.
std::string writeln_text(std::span<const Term> args, const Store& store);

} // namespace natlog
