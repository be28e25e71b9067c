#include "natlog/terms.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

namespace natlog {

Symbol Symbol::intern(std::string_view text) {
    static std::mutex mutex;
    static std::unordered_set<std::string> pool;
    std::lock_guard lock(mutex);
    auto it = pool.emplace(text).first;
    return Symbol(&*it);
}

// ---------------------------------------------------------------------------
// Term

namespace {

const TupleRef& empty_tuple_node() {
    static const TupleRef node = std::make_shared<const TupleNode>(std::vector<Term>{});
    return node;
}

[[noreturn]] void depth_exceeded(std::size_t limit) {
    throw Error("term depth limit " + std::to_string(limit) + " exceeded (cyclic term?)");
}

} // namespace

Term::Term() : v_(empty_tuple_node()) {}

Term Term::tuple(std::vector<Term> items) {
    if (items.empty())
        return Term();
    return Term(Rep(TupleRef(std::make_shared<const TupleNode>(std::move(items)))));
}

Term Term::host(HostRef object) { return Term(Rep(std::move(object))); }

std::span<const Term> Term::items() const {
    if (auto* t = std::get_if<TupleRef>(&v_))
        return (*t)->items();
    return {};
}

bool Term::ground() const {
    switch (kind()) {
    case TermKind::var: return false;
    case TermKind::tuple: return tuple_ref()->ground();
    default: return true;
    }
}

bool operator==(const Term& a, const Term& b) {
    if (a.kind() != b.kind())
        return false;
    switch (a.kind()) {
    case TermKind::var: return a.as_var() == b.as_var();
    case TermKind::integer: return a.as_int() == b.as_int();
    case TermKind::real: return a.as_real() == b.as_real();
    case TermKind::text: return a.as_text() == b.as_text();
    case TermKind::host: return a.as_host() == b.as_host();
    case TermKind::tuple: {
        if (a.tuple_ref() == b.tuple_ref())
            return true;
        auto xs = a.items(), ys = b.items();
        if (xs.size() != ys.size())
            return false;
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (!(xs[i] == ys[i]))
                return false;
        return true;
    }
    }
    return false;
}

TupleNode::TupleNode(std::vector<Term> items) : items_(std::move(items)), ground_(true) {
    for (const auto& t : items_)
        if (!t.ground()) {
            ground_ = false;
            break;
        }
}

// Long cons-lists nest deeply; tear them down without recursion.
TupleNode::~TupleNode() {
    std::vector<TupleRef> pending;
    auto steal = [&pending](std::vector<Term>& items) {
        for (auto& t : items)
            if (t.is_tuple() && t.tuple_ref().use_count() == 1)
                pending.push_back(t.tuple_ref());
        items.clear();
    };
    steal(items_);
    while (!pending.empty()) {
        TupleRef node = std::move(pending.back());
        pending.pop_back();
        if (node.use_count() == 1)
            steal(const_cast<TupleNode&>(*node).items_);
    }
}

HostObject::HostObject() {
    static std::atomic<std::uint64_t> next{1};
    id_ = next++;
}

void HostObject::render(std::string& out, const std::function<void(const Term&)>&) const {
    out += '<';
    out += kind_name();
    out += ':';
    out += std::to_string(id_);
    out += '>';
}

// ---------------------------------------------------------------------------
// Store

Var Store::fresh() {
    cells_.emplace_back();
    return Var{static_cast<VarId>(cells_.size() - 1)};
}

VarId Store::fresh_block(std::uint32_t count) {
    auto base = static_cast<VarId>(cells_.size());
    cells_.resize(cells_.size() + count);
    return base;
}

void Store::bind(Var v, Term value) {
    auto& c = cells_.at(v.id);
    if (c)
        throw std::logic_error("rebinding a bound variable");
    c = std::move(value);
    trail_.push_back(v.id);
}

void Store::undo_to(TrailMark m) {
    if (m.depth > trail_.size() || m.cells > cells_.size())
        throw std::logic_error("invalid trail mark");
    while (trail_.size() > m.depth) {
        cells_[trail_.back()].reset();
        trail_.pop_back();
    }
    cells_.resize(m.cells);
}

Term Store::deref(Term t) const {
    while (t.is_var()) {
        if (t.as_var().id >= cells_.size())
            break;
        const auto& c = cells_[t.as_var().id];
        if (!c)
            break;
        t = *c;
    }
    return t;
}

bool Store::same_state(const Store& other) const {
    return cells_ == other.cells_ && trail_ == other.trail_;
}

// ---------------------------------------------------------------------------
// Unification

namespace {

bool occurs(Var v, const Term& t, const Store& store) {
    std::vector<Term> todo{t};
    while (!todo.empty()) {
        Term x = store.deref(todo.back());
        todo.pop_back();
        if (x.is_var()) {
            if (x.as_var() == v)
                return true;
        } else if (x.is_tuple() && !x.ground()) {
            for (const auto& c : x.items())
                todo.push_back(c);
        }
    }
    return false;
}

bool same_atomic(const Term& x, const Term& y) {
    if (x.kind() != y.kind())
        return false;
    switch (x.kind()) {
    case TermKind::integer: return x.as_int() == y.as_int();
    case TermKind::real: return x.as_real() == y.as_real();
    case TermKind::text: return x.as_text() == y.as_text();
    case TermKind::host: return x.as_host() == y.as_host();
    default: return false;
    }
}

} // namespace

bool unify(const Term& a, const Term& b, Store& store, bool occurs_check) {
    const TrailMark start = store.mark();
    std::vector<std::pair<Term, Term>> todo{{a, b}};
    while (!todo.empty()) {
        auto [x, y] = std::move(todo.back());
        todo.pop_back();
        x = store.deref(std::move(x));
        y = store.deref(std::move(y));
        if (x.is_var() && y.is_var()) {
            Var vx = x.as_var(), vy = y.as_var();
            if (vx == vy)
                continue;
            // younger cell points at older one
            if (vx.id < vy.id)
                store.bind(vy, x);
            else
                store.bind(vx, y);
            continue;
        }
        if (x.is_var() || y.is_var()) {
            Var v = x.is_var() ? x.as_var() : y.as_var();
            const Term& value = x.is_var() ? y : x;
            if (occurs_check && !value.ground() && occurs(v, value, store)) {
                store.undo_to(start);
                return false;
            }
            store.bind(v, value);
            continue;
        }
        if (x.is_tuple() && y.is_tuple()) {
            if (x.tuple_ref() == y.tuple_ref())
                continue;
            auto xs = x.items(), ys = y.items();
            if (xs.size() != ys.size()) {
                store.undo_to(start);
                return false;
            }
            for (std::size_t i = xs.size(); i-- > 0;)
                todo.emplace_back(xs[i], ys[i]);
            continue;
        }
        if (!same_atomic(x, y)) {
            store.undo_to(start);
            return false;
        }
    }
    return true;
}

bool identical(const Term& a, const Term& b, const Store& store) {
    std::vector<std::pair<Term, Term>> todo{{a, b}};
    while (!todo.empty()) {
        auto [x, y] = std::move(todo.back());
        todo.pop_back();
        x = store.deref(std::move(x));
        y = store.deref(std::move(y));
        if (x.kind() != y.kind())
            return false;
        if (x.is_var()) {
            if (!(x.as_var() == y.as_var()))
                return false;
        } else if (x.is_tuple()) {
            if (x.tuple_ref() == y.tuple_ref())
                continue;
            auto xs = x.items(), ys = y.items();
            if (xs.size() != ys.size())
                return false;
            for (std::size_t i = 0; i < xs.size(); ++i)
                todo.emplace_back(xs[i], ys[i]);
        } else if (!same_atomic(x, y)) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Copying

namespace {

Term resolve_rec(const Term& t, const Store& store, std::size_t depth, std::size_t limit) {
    if (depth > limit)
        depth_exceeded(limit);
    if (t.is_var()) {
        Term d = store.deref(t);
        return d.is_var() ? d : resolve_rec(d, store, depth + 1, limit);
    }
    if (!t.is_tuple() || t.ground())
        return t;
    auto xs = t.items();
    std::vector<Term> out;
    bool changed = false;
    out.reserve(xs.size());
    for (const auto& x : xs) {
        out.push_back(resolve_rec(x, store, depth + 1, limit));
        const Term& y = out.back();
        if (x.is_var())
            changed = changed || !y.is_var() || !(y.as_var() == x.as_var());
        else if (x.is_tuple())
            changed = changed || y.tuple_ref() != x.tuple_ref();
    }
    return changed ? Term::tuple(std::move(out)) : t;
}

struct Detacher {
    const Store& store;
    std::size_t limit;
    std::unordered_map<VarId, VarId> renames;

    Term run(const Term& t, std::size_t depth) {
        if (depth > limit)
            depth_exceeded(limit);
        if (t.is_var()) {
            Term d = store.deref(t);
            if (!d.is_var())
                return run(d, depth + 1);
            auto [it, inserted] = renames.emplace(d.as_var().id, static_cast<VarId>(renames.size()));
            return Var{it->second};
        }
        if (!t.is_tuple() || t.ground())
            return t;
        std::vector<Term> out;
        out.reserve(t.arity());
        for (const auto& x : t.items())
            out.push_back(run(x, depth + 1));
        return Term::tuple(std::move(out));
    }
};

} // namespace

Term resolve(const Term& t, const Store& store, std::size_t depth_limit) {
    return resolve_rec(t, store, 0, depth_limit);
}

DetachedTerm detach(const Term& t, const Store& store, std::size_t depth_limit) {
    Detacher d{store, depth_limit, {}};
    Term out = d.run(t, 0);
    return DetachedTerm{std::move(out), static_cast<std::uint32_t>(d.renames.size())};
}

Term shift(const Term& t, VarId base) {
    if (t.is_var())
        return Var{t.as_var().id + base};
    if (!t.is_tuple() || t.ground())
        return t;
    std::vector<Term> out;
    out.reserve(t.arity());
    for (const auto& x : t.items())
        out.push_back(shift(x, base));
    return Term::tuple(std::move(out));
}

Term attach(const DetachedTerm& t, Store& store) {
    if (t.nvars == 0)
        return t.term;
    return shift(t.term, store.fresh_block(t.nvars));
}

Term copy_term(const Term& t, Store& store, std::size_t depth_limit) {
    return attach(detach(t, store, depth_limit), store);
}

// ---------------------------------------------------------------------------
// Cons-lists

Term tuple_to_cons(std::span<const Term> items) {
    Term list;
    for (std::size_t i = items.size(); i-- > 0;)
        list = Term::tuple({items[i], std::move(list)});
    return list;
}

std::vector<Term> cons_items(const Term& list, const Store& store) {
    std::vector<Term> out;
    Term cur = store.deref(list);
    for (;;) {
        if (cur.is_var())
            throw Error("improper list: unbound tail");
        if (!cur.is_tuple() || (cur.arity() != 0 && cur.arity() != 2))
            throw Error("not a cons-list: " + render(cur, store));
        if (cur.arity() == 0)
            return out;
        out.push_back(cur[0]);
        cur = store.deref(cur[1]);
    }
}

Term cons_to_tuple(const Term& list, const Store& store) { return Term::tuple(cons_items(list, store)); }

std::string_view term_type(const Term& t, const Store& store) {
    switch (store.deref(t).kind()) {
    case TermKind::var: return "var";
    case TermKind::integer: return "int";
    case TermKind::real: return "float";
    case TermKind::text: return "str";
    case TermKind::tuple: return "tuple";
    case TermKind::host: return "obj";
    }
    return "obj";
}

// ---------------------------------------------------------------------------
// Rendering

std::string render_float(double value) {
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value < 0 ? "-inf" : "inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific);
    std::string sci(buf, res.ptr);
    std::string sign;
    if (sci[0] == '-') {
        sign = "-";
        sci.erase(0, 1);
    }
    auto e = sci.find('e');
    std::string digits = sci.substr(0, e);
    digits.erase(std::remove(digits.begin(), digits.end(), '.'), digits.end());
    int exp = std::stoi(sci.substr(e + 1));
    // Same layout rule as Python's float repr.
    if (exp >= -4 && exp < 16) {
        std::string out;
        if (exp >= 0) {
            auto int_len = static_cast<std::size_t>(exp) + 1;
            if (digits.size() <= int_len)
                out = digits + std::string(int_len - digits.size(), '0') + ".0";
            else
                out = digits.substr(0, int_len) + "." + digits.substr(int_len);
        } else {
            out = "0." + std::string(static_cast<std::size_t>(-exp - 1), '0') + digits;
        }
        return sign + out;
    }
    std::string out = digits.substr(0, 1);
    if (digits.size() > 1)
        out += "." + digits.substr(1);
    std::string ex = std::to_string(std::abs(exp));
    if (ex.size() < 2)
        ex = "0" + ex;
    return sign + out + "e" + (exp < 0 ? "-" : "+") + ex;
}

std::string quote_text(std::string_view text) {
    const bool has_single = text.find('\'') != std::string_view::npos;
    const bool has_double = text.find('"') != std::string_view::npos;
    const char q = (has_single && !has_double) ? '"' : '\'';
    std::string out(1, q);
    for (char c : text) {
        switch (c) {
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
            if (c == q) {
                out += '\\';
                out += c;
            } else if (static_cast<unsigned char>(c) < 0x20) {
                static const char* hex = "0123456789abcdef";
                out += "\\x";
                out += hex[(c >> 4) & 0xf];
                out += hex[c & 0xf];
            } else {
                out += c;
            }
        }
    }
    out += q;
    return out;
}

namespace {

struct Renderer {
    const Store* store;
    std::size_t limit;
    std::string out;

    void run(const Term& t0, std::size_t depth) {
        if (depth > limit)
            depth_exceeded(limit);
        Term t = store ? store->deref(t0) : t0;
        switch (t.kind()) {
        case TermKind::var:
            out += '_';
            out += std::to_string(t.as_var().id);
            break;
        case TermKind::integer: out += std::to_string(t.as_int()); break;
        case TermKind::real: out += render_float(t.as_real()); break;
        case TermKind::text: out += quote_text(t.as_text().str()); break;
        case TermKind::tuple: {
            auto xs = t.items();
            out += '(';
            for (std::size_t i = 0; i < xs.size(); ++i) {
                if (i)
                    out += ", ";
                run(xs[i], depth + 1);
            }
            if (xs.size() == 1)
                out += ',';
            out += ')';
            break;
        }
        case TermKind::host:
            t.as_host()->render(out, [this, depth](const Term& x) { run(x, depth + 1); });
            break;
        }
    }
};

} // namespace

std::string render(const Term& t, const Store& store, std::size_t depth_limit) {
    Renderer r{&store, depth_limit, {}};
    r.run(t, 0);
    return std::move(r.out);
}

std::string render(const Term& t, std::size_t depth_limit) {
    Renderer r{nullptr, depth_limit, {}};
    r.run(t, 0);
    return std::move(r.out);
}

std::string display(const Term& t, const Store& store) {
    Term d = store.deref(t);
    if (d.is_text())
        return d.as_text().str();
    return render(d, store);
}

} // namespace natlog
