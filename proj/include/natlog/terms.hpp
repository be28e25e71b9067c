#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "natlog/error.hpp"

namespace natlog {

// Interned text constant. Two symbols are equal iff their spellings are.
class Symbol {
public:
    static Symbol intern(std::string_view text);

    const std::string& str() const { return *text_; }
    const std::string* key() const { return text_; }

    friend bool operator==(Symbol a, Symbol b) { return a.text_ == b.text_; }

private:
    explicit Symbol(const std::string* text) : text_(text) {}
    const std::string* text_;
};

using VarId = std::uint32_t;

struct Var {
    VarId id;
    friend bool operator==(Var a, Var b) { return a.id == b.id; }
};

class Term;
class TupleNode;
class HostObject;

using TupleRef = std::shared_ptr<const TupleNode>;
using HostRef = std::shared_ptr<HostObject>;

enum class TermKind { var, integer, real, text, tuple, host };

class Term {
public:
    // The default term is the empty tuple `()`.
    Term();
    Term(Var v) : v_(v) {}
    Term(Symbol s) : v_(s) {}

    static Term integer(std::int64_t value) { return Term(Rep(value)); }
    static Term real(double value) { return Term(Rep(value)); }
    static Term text(std::string_view value) { return Term(Symbol::intern(value)); }
    static Term tuple(std::vector<Term> items);
    static Term host(HostRef object);

    TermKind kind() const { return static_cast<TermKind>(v_.index()); }
    bool is_var() const { return kind() == TermKind::var; }
    bool is_int() const { return kind() == TermKind::integer; }
    bool is_real() const { return kind() == TermKind::real; }
    bool is_number() const { return is_int() || is_real(); }
    bool is_text() const { return kind() == TermKind::text; }
    bool is_tuple() const { return kind() == TermKind::tuple; }
    bool is_host() const { return kind() == TermKind::host; }
    bool is_atomic() const { return is_int() || is_real() || is_text(); }
    bool is_text(std::string_view spelling) const { return is_text() && as_text().str() == spelling; }

    Var as_var() const { return std::get<Var>(v_); }
    std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
    double as_real() const { return std::get<double>(v_); }
    Symbol as_text() const { return std::get<Symbol>(v_); }
    const HostRef& as_host() const { return std::get<HostRef>(v_); }
    const TupleRef& tuple_ref() const { return std::get<TupleRef>(v_); }

    // Tuple children; empty for non-tuples.
    std::span<const Term> items() const;
    std::size_t arity() const { return items().size(); }
    const Term& operator[](std::size_t i) const { return items()[i]; }

    // True when no variable occurs anywhere inside.
    bool ground() const;

    // Raw structural equality: variables by id, host objects by identity.
    friend bool operator==(const Term& a, const Term& b);

private:
    using Rep = std::variant<Var, std::int64_t, double, Symbol, TupleRef, HostRef>;
    explicit Term(Rep rep) : v_(std::move(rep)) {}
    Rep v_;
};

class TupleNode {
public:
    explicit TupleNode(std::vector<Term> items);
    ~TupleNode();
    TupleNode(const TupleNode&) = delete;
    TupleNode& operator=(const TupleNode&) = delete;

    std::span<const Term> items() const { return items_; }
    bool ground() const { return ground_; }

private:
    std::vector<Term> items_;
    bool ground_;
};

// Identity-compared object owned by the host side: lists, maps, property
// bags and engines.
class HostObject {
public:
    HostObject();
    virtual ~HostObject() = default;

    std::uint64_t id() const { return id_; }
    virtual std::string_view kind_name() const = 0;

    // Default rendering is `<kind:id>`; maps override this.
    virtual void render(std::string& out, const std::function<void(const Term&)>& element) const;

private:
    std::uint64_t id_;
};

// ---------------------------------------------------------------------------
// Binding store

struct TrailMark {
    std::size_t depth = 0;
    std::size_t cells = 0;
};

class Store {
public:
    Var fresh();
    // Allocates `count` consecutive unbound cells and returns the first id.
    VarId fresh_block(std::uint32_t count);

    bool bound(Var v) const { return cells_.at(v.id).has_value(); }
    const std::optional<Term>& cell(Var v) const { return cells_.at(v.id); }

    // Precondition: v is unbound.
    void bind(Var v, Term value);

    TrailMark mark() const { return TrailMark{trail_.size(), cells_.size()}; }
    // Unbinds everything trailed after m and drops cells allocated after it.
    void undo_to(TrailMark m);

    Term deref(Term t) const;

    std::size_t trail_size() const { return trail_.size(); }
    std::size_t cell_count() const { return cells_.size(); }

    bool same_state(const Store& other) const;

private:
    std::vector<std::optional<Term>> cells_;
    std::vector<VarId> trail_;
};

inline constexpr std::size_t default_depth_limit = 10000;

bool unify(const Term& a, const Term& b, Store& store, bool occurs_check = false);

// Structural identity after dereferencing (Prolog's ==).
bool identical(const Term& a, const Term& b, const Store& store);

// Substitutes all bindings; unbound variables stay as they are.
Term resolve(const Term& t, const Store& store, std::size_t depth_limit = default_depth_limit);

// A term whose variables are numbered 0..nvars-1 independently of any store.
// Parsed items, clauses and answers copied out of an engine all use this form.
struct DetachedTerm {
    Term term;
    std::uint32_t nvars = 0;
};

DetachedTerm detach(const Term& t, const Store& store, std::size_t depth_limit = default_depth_limit);
Term attach(const DetachedTerm& t, Store& store);
// Renumbers variable i as base+i.
Term shift(const Term& t, VarId base);

Term copy_term(const Term& t, Store& store, std::size_t depth_limit = default_depth_limit);

// Cons-lists: `()` or a 2-tuple (head tail).
Term tuple_to_cons(std::span<const Term> items);
std::vector<Term> cons_items(const Term& list, const Store& store);
Term cons_to_tuple(const Term& list, const Store& store);

// One of var, int, float, str, tuple, obj.
std::string_view term_type(const Term& t, const Store& store);

// Canonical answer syntax: texts single-quoted, tuples comma separated with a
// trailing comma on 1-tuples, unbound variables as `_<id>`.
std::string render(const Term& t, const Store& store, std::size_t depth_limit = default_depth_limit);
std::string render(const Term& t, std::size_t depth_limit = default_depth_limit);

// Like render, but a text constant at the top level is written bare.
std::string display(const Term& t, const Store& store);

std::string render_float(double value);
std::string quote_text(std::string_view text);

} // namespace natlog
