#include "natlog/builtins.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "natlog/promptgen.hpp"

namespace natlog {

// ---------------------------------------------------------------------------
// Host objects

void HostMap::render(std::string& out, const std::function<void(const Term&)>& element) const {
    out += '{';
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (i)
            out += ", ";
        element(entries_[i].first);
        out += ": ";
        element(entries_[i].second);
    }
    out += '}';
}

const Term* HostMap::find(const Term& key) const {
    for (const auto& [k, v] : entries_)
        if (k == key)
            return &v;
    return nullptr;
}

void HostMap::put(Term key, Term value) {
    for (auto& [k, v] : entries_)
        if (k == key) {
            v = std::move(value);
            return;
        }
    entries_.emplace_back(std::move(key), std::move(value));
}

const Term* PropBag::get(std::string_view name) const {
    for (const auto& [k, v] : props_)
        if (k == name)
            return &v;
    return nullptr;
}

void PropBag::set(std::string name, Term value) {
    for (auto& [k, v] : props_)
        if (k == name) {
            v = std::move(value);
            return;
        }
    props_.emplace_back(std::move(name), std::move(value));
}

// ---------------------------------------------------------------------------
// Registry

void Registry::add_fn(std::string name, int arity, HostFn fn) {
    fns_.insert_or_assign(std::move(name), HostEntry<HostFn>{arity, std::move(fn)});
}
void Registry::add_gen(std::string name, int arity, HostGen gen) {
    gens_.insert_or_assign(std::move(name), HostEntry<HostGen>{arity, std::move(gen)});
}
void Registry::add_effect(std::string name, int arity, HostEffect effect) {
    effects_.insert_or_assign(std::move(name), HostEntry<HostEffect>{arity, std::move(effect)});
}

namespace {

template <class M>
auto* lookup(const M& m, std::string_view name) {
    auto it = m.find(name);
    return it == m.end() ? nullptr : &it->second;
}

template <class M>
void collect_names(const M& m, std::vector<std::string>& out) {
    for (const auto& [k, v] : m)
        out.push_back(k);
}

} // namespace

const HostEntry<HostFn>* Registry::fn(std::string_view name) const { return lookup(fns_, name); }
const HostEntry<HostGen>* Registry::gen(std::string_view name) const { return lookup(gens_, name); }
const HostEntry<HostEffect>* Registry::effect(std::string_view name) const { return lookup(effects_, name); }

std::vector<std::string> Registry::names(HostKind kind) const {
    std::vector<std::string> out;
    switch (kind) {
    case HostKind::fn: collect_names(fns_, out); break;
    case HostKind::gen: collect_names(gens_, out); break;
    case HostKind::effect: collect_names(effects_, out); break;
    }
    return out;
}

void check_arity(std::string_view kind, std::string_view name, int expected, std::size_t got) {
    if (expected == any_arity || static_cast<std::size_t>(expected) == got)
        return;
    throw Error(std::string(kind) + " " + std::string(name) + " expects " + std::to_string(expected) +
                " input(s), got " + std::to_string(got));
}

// ---------------------------------------------------------------------------
// Output helpers

std::string print_text(std::span<const Term> args, const Store& store) {
    std::string out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i)
            out += ' ';
        out += display(args[i], store);
    }
    return out;
}

std::string writeln_text(std::span<const Term> args, const Store& store) {
    if (args.size() == 1) {
        Term t = store.deref(args[0]);
        if (t.is_tuple())
            return print_text(t.items(), store);
        if (auto list = host_cast<HostList>(t))
            return print_text(list->items, store);
    }
    return print_text(args, store);
}

// ---------------------------------------------------------------------------
// Default host functions

namespace {

[[noreturn]] void type_error(const HostCall& c, std::string_view expected, const Term& got) {
    throw Error("type error in " + std::string(c.name) + ": expected " + std::string(expected) + ", got " +
                render(got, c.store));
}

// Elements of a tuple or host list.
std::vector<Term> sequence_arg(const HostCall& c, const Term& t) {
    if (t.is_tuple())
        return {t.items().begin(), t.items().end()};
    if (auto list = host_cast<HostList>(t))
        return list->items;
    type_error(c, "tuple or list", t);
}

std::int64_t int_arg(const HostCall& c, const Term& t) {
    if (!t.is_int())
        type_error(c, "int", t);
    return t.as_int();
}

std::size_t utf8_length(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char ch : s)
        if ((ch & 0xC0) != 0x80)
            ++n;
    return n;
}

std::optional<Term> host_len(const HostCall& c) {
    const Term& t = c.args[0];
    if (t.is_tuple())
        return Term::integer(static_cast<std::int64_t>(t.arity()));
    if (t.is_text())
        return Term::integer(static_cast<std::int64_t>(utf8_length(t.as_text().str())));
    if (auto list = host_cast<HostList>(t))
        return Term::integer(static_cast<std::int64_t>(list->items.size()));
    if (auto map = host_cast<HostMap>(t))
        return Term::integer(static_cast<std::int64_t>(map->size()));
    type_error(c, "tuple, list, map or str", t);
}

std::optional<Term> host_arg(const HostCall& c) {
    auto items = sequence_arg(c, c.args[0]);
    auto i = int_arg(c, c.args[1]);
    if (i < 0 || static_cast<std::size_t>(i) >= items.size())
        throw Error("arg: index " + std::to_string(i) + " out of range for size " + std::to_string(items.size()));
    return items[static_cast<std::size_t>(i)];
}

std::optional<Term> host_dict(const HostCall& c) {
    auto map = std::make_shared<HostMap>();
    for (const auto& pair : sequence_arg(c, c.args[0])) {
        if (!pair.is_tuple() || pair.arity() != 2)
            type_error(c, "(key value) pair", pair);
        map->put(pair[0], pair[1]);
    }
    return Term::host(map);
}

std::optional<Term> host_list(const HostCall& c) {
    if (c.args.empty())
        return Term::host(std::make_shared<HostList>());
    if (c.args.size() != 1)
        throw Error("list expects 0 or 1 input(s), got " + std::to_string(c.args.size()));
    return Term::host(std::make_shared<HostList>(sequence_arg(c, c.args[0])));
}

std::optional<Term> host_split(const HostCall& c) {
    const Term& t = c.args[0];
    if (!t.is_text())
        type_error(c, "str", t);
    std::istringstream in(t.as_text().str());
    auto list = std::make_shared<HostList>();
    std::string word;
    while (in >> word)
        list->items.push_back(Term::text(word));
    return Term::host(list);
}

std::optional<Term> host_join(const HostCall& c) {
    if (c.args.empty() || c.args.size() > 2)
        throw Error("join expects 1 or 2 input(s), got " + std::to_string(c.args.size()));
    std::string sep = " ";
    if (c.args.size() == 2) {
        if (!c.args[1].is_text())
            type_error(c, "str separator", c.args[1]);
        sep = c.args[1].as_text().str();
    }
    std::string out;
    auto items = sequence_arg(c, c.args[0]);
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i)
            out += sep;
        out += display(items[i], c.store);
    }
    return Term::text(out);
}

std::optional<Term> host_to_list(const HostCall& c) {
    const Term& t = c.args[0];
    if (auto list = host_cast<HostList>(t))
        return Term::host(std::make_shared<HostList>(list->items));
    return Term::host(std::make_shared<HostList>(cons_items(t, c.store)));
}

std::optional<Term> host_to_cons_list(const HostCall& c) {
    auto items = sequence_arg(c, c.args[0]);
    return tuple_to_cons(items);
}

std::optional<Term> host_from_cons(const HostCall& c) { return cons_to_tuple(c.args[0], c.store); }

std::optional<Term> call_method(const HostCall& c) {
    const Term& obj = c.args[0];
    const Term& method = c.args[1];
    if (!method.is_text())
        type_error(c, "method name", method);
    const std::string& m = method.as_text().str();
    auto margs = sequence_arg(c, c.args[2]);
    auto need = [&](std::size_t n) {
        if (margs.size() != n)
            throw Error("method " + m + " expects " + std::to_string(n) + " argument(s), got " +
                        std::to_string(margs.size()));
    };
    if (auto list = host_cast<HostList>(obj)) {
        if (m == "append") {
            need(1);
            list->items.push_back(margs[0]);
            return Term();
        }
        if (m == "pop") {
            need(0);
            if (list->items.empty())
                throw Error("pop from empty list");
            Term last = std::move(list->items.back());
            list->items.pop_back();
            return last;
        }
        if (m == "len") {
            need(0);
            return Term::integer(static_cast<std::int64_t>(list->items.size()));
        }
        throw Error("unknown method list." + m);
    }
    if (auto map = host_cast<HostMap>(obj)) {
        if (m == "get") {
            need(1);
            const Term* v = map->find(margs[0]);
            return v ? std::optional<Term>(*v) : std::nullopt;
        }
        if (m == "put") {
            need(2);
            map->put(margs[0], margs[1]);
            return Term();
        }
        throw Error("unknown method map." + m);
    }
    type_error(c, "host object with methods", obj);
}

std::string prop_name(const HostCall& c, const Term& t) {
    if (t.is_text())
        return t.as_text().str();
    if (t.is_int())
        return std::to_string(t.as_int());
    type_error(c, "property name", t);
}

std::optional<Term> host_getprop(const HostCall& c) {
    if (auto bag = host_cast<PropBag>(c.args[0])) {
        const Term* v = bag->get(prop_name(c, c.args[1]));
        return v ? std::optional<Term>(*v) : std::nullopt;
    }
    if (auto map = host_cast<HostMap>(c.args[0])) {
        const Term* v = map->find(c.args[1]);
        return v ? std::optional<Term>(*v) : std::nullopt;
    }
    type_error(c, "propbag or map", c.args[0]);
}

void host_setprop(const HostCall& c) {
    if (auto bag = host_cast<PropBag>(c.args[0])) {
        bag->set(prop_name(c, c.args[1]), c.args[2]);
        return;
    }
    if (auto map = host_cast<HostMap>(c.args[0])) {
        map->put(c.args[1], c.args[2]);
        return;
    }
    type_error(c, "propbag or map", c.args[0]);
}

HostGenerator host_range(const HostCall& c) {
    if (c.args.empty() || c.args.size() > 3)
        throw Error("range expects 1 to 3 input(s), got " + std::to_string(c.args.size()));
    std::int64_t start = 0, stop = 0, step = 1;
    if (c.args.size() == 1) {
        stop = int_arg(c, c.args[0]);
    } else {
        start = int_arg(c, c.args[0]);
        stop = int_arg(c, c.args[1]);
        if (c.args.size() == 3)
            step = int_arg(c, c.args[2]);
    }
    if (step == 0)
        throw Error("range: step must not be zero");
    return [i = start, stop, step]() mutable -> std::optional<Term> {
        if ((step > 0 && i >= stop) || (step < 0 && i <= stop))
            return std::nullopt;
        Term t = Term::integer(i);
        i += step;
        return t;
    };
}

std::string text_arg(const HostCall& c, const Term& t) {
    if (t.is_tuple())
        return print_text(t.items(), c.store);
    return display(t, c.store);
}

} // namespace

Registry default_registry(std::shared_ptr<Completer> completer) {
    if (!completer)
        completer = std::make_shared<MockCompleter>();

    Registry r;
    r.add_fn("len", 1, host_len);
    r.add_fn("arg", 2, host_arg);
    r.add_fn("dict", 1, host_dict);
    r.add_fn("list", any_arity, host_list);
    r.add_fn("split", 1, host_split);
    r.add_fn("join", any_arity, host_join);
    r.add_fn("to_list", 1, host_to_list);
    r.add_fn("to_cons_list", 1, host_to_cons_list);
    r.add_fn("from_cons_list_as_tuple", 1, host_from_cons);
    r.add_fn("to_tuple", 1, host_from_cons);
    r.add_fn("meth_call", 3, call_method);
    r.add_fn("getprop", 2, host_getprop);
    r.add_fn("getattr", 2, host_getprop);
    r.add_fn("propbag", 0, [](const HostCall&) { return std::optional<Term>(Term::host(std::make_shared<PropBag>())); });
    r.add_fn("type", 1, [](const HostCall& c) { return std::optional<Term>(Term::text(term_type(c.args[0], c.store))); });
    r.add_fn("complete", 1, [completer](const HostCall& c) {
        return std::optional<Term>(Term::text(completer->complete(text_arg(c, c.args[0]))));
    });
    r.add_fn("paint", 1, [completer](const HostCall& c) {
        return std::optional<Term>(Term::text(completer->paint(text_arg(c, c.args[0]))));
    });
    r.add_fn("analogy_prompt", 3, [](const HostCall& c) {
        return std::optional<Term>(Term::text(
            analogy_prompt(display(c.args[0], c.store), display(c.args[1], c.store), display(c.args[2], c.store))));
    });

    r.add_gen("range", any_arity, host_range);

    r.add_effect("print", any_arity, [](const HostCall& c) { c.out << print_text(c.args, c.store) << '\n'; });
    r.add_effect("writeln", any_arity, [](const HostCall& c) { c.out << writeln_text(c.args, c.store) << '\n'; });
    r.add_effect("nl", 0, [](const HostCall& c) { c.out << '\n'; });
    r.add_effect("browse", any_arity, [](const HostCall& c) { c.log << "browse: " << print_text(c.args, c.store) << '\n'; });
    r.add_effect("setprop", 3, host_setprop);
    r.add_effect("setattr", 3, host_setprop);
    r.add_effect("meth_call", 3, [](const HostCall& c) { call_method(c); });
    return r;
}

// ---------------------------------------------------------------------------
// Arithmetic

Term number_term(Number n) {
    if (auto* i = std::get_if<std::int64_t>(&n))
        return Term::integer(*i);
    return Term::real(std::get<double>(n));
}

namespace {

double as_double(Number n) {
    if (auto* i = std::get_if<std::int64_t>(&n))
        return static_cast<double>(*i);
    return std::get<double>(n);
}

bool both_int(Number a, Number b) {
    return std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b);
}

[[noreturn]] void arith_error(const std::string& what) { throw Error("arithmetic error: " + what); }

Number apply_op(std::string_view op, Number a, Number b) {
    if (both_int(a, b)) {
        std::int64_t x = std::get<std::int64_t>(a), y = std::get<std::int64_t>(b), r = 0;
        if (op == "+") {
            if (__builtin_add_overflow(x, y, &r))
                arith_error("integer overflow");
            return r;
        }
        if (op == "-") {
            if (__builtin_sub_overflow(x, y, &r))
                arith_error("integer overflow");
            return r;
        }
        if (op == "*") {
            if (__builtin_mul_overflow(x, y, &r))
                arith_error("integer overflow");
            return r;
        }
        if (op == "//" || op == "mod") {
            if (y == 0)
                arith_error("division by zero");
            if (x == std::numeric_limits<std::int64_t>::min() && y == -1) {
                if (op == "mod")
                    return std::int64_t{0};
                arith_error("integer overflow");
            }
            std::int64_t q = x / y, m = x % y;
            if (m != 0 && ((m < 0) != (y < 0))) {
                --q;
                m += y;
            }
            return op == "//" ? q : m;
        }
    }
    double x = as_double(a), y = as_double(b);
    if (op == "+")
        return x + y;
    if (op == "-")
        return x - y;
    if (op == "*")
        return x * y;
    if (op == "/") {
        if (y == 0)
            arith_error("division by zero");
        return x / y;
    }
    if (op == "//") {
        if (y == 0)
            arith_error("division by zero");
        return std::floor(x / y);
    }
    if (op == "mod") {
        if (y == 0)
            arith_error("division by zero");
        double m = std::fmod(x, y);
        if (m != 0 && ((m < 0) != (y < 0)))
            m += y;
        return m;
    }
    arith_error("unknown operator " + std::string(op));
}

int precedence(const Term& t) {
    if (!t.is_text())
        return 0;
    const auto& s = t.as_text().str();
    if (s == "+" || s == "-")
        return 1;
    if (s == "*" || s == "/" || s == "//" || s == "mod")
        return 2;
    return 0;
}

class ExprParser {
public:
    ExprParser(std::span<const Term> expr, const Store& store) : xs_(expr), store_(store) {}

    Number run() {
        if (xs_.empty())
            arith_error("empty expression");
        Number n = parse(1);
        if (pos_ != xs_.size())
            arith_error("malformed expression near " + render(xs_[pos_], store_));
        return n;
    }

private:
    Number parse(int min_prec) {
        Number lhs = operand();
        while (pos_ < xs_.size()) {
            Term op = store_.deref(xs_[pos_]);
            int prec = precedence(op);
            if (prec == 0)
                arith_error("expected an operator, got " + render(op, store_));
            if (prec < min_prec)
                break;
            ++pos_;
            Number rhs = parse(prec + 1);
            lhs = apply_op(op.as_text().str(), lhs, rhs);
        }
        return lhs;
    }

    Number operand() {
        if (pos_ >= xs_.size())
            arith_error("missing operand");
        Term t = store_.deref(xs_[pos_++]);
        switch (t.kind()) {
        case TermKind::integer: return t.as_int();
        case TermKind::real: return t.as_real();
        case TermKind::var: throw Error("unbound arithmetic operand");
        case TermKind::tuple: return evaluate(t.items(), store_);
        case TermKind::text:
            if (t.as_text().str() == "-") {
                Number n = operand();
                if (auto* i = std::get_if<std::int64_t>(&n)) {
                    if (*i == std::numeric_limits<std::int64_t>::min())
                        arith_error("integer overflow");
                    return -*i;
                }
                return -std::get<double>(n);
            }
            [[fallthrough]];
        default:
            throw Error("type error: not a number: " + render(t, store_));
        }
    }

    std::span<const Term> xs_;
    const Store& store_;
    std::size_t pos_ = 0;
};

bool is_comparison(const Term& t) {
    if (!t.is_text())
        return false;
    const auto& s = t.as_text().str();
    return s == ">" || s == "<" || s == ">=" || s == "<=" || s == "=<" || s == "==" || s == "!=";
}

} // namespace

Number evaluate(std::span<const Term> expr, const Store& store) {
    // a single parenthesized operand nests one level
    return ExprParser(expr, store).run();
}

WithResult eval_with(std::span<const Term> goal, const Store& store) {
    if (goal.size() < 4 || !store.deref(goal[goal.size() - 2]).is_text("as"))
        throw Error("with: expected 'with Expr as Var'");
    return WithResult{evaluate(goal.subspan(1, goal.size() - 3), store), goal.back()};
}

bool eval_when(std::span<const Term> goal, const Store& store) {
    std::size_t k = 1;
    while (k < goal.size() && !is_comparison(store.deref(goal[k])))
        ++k;
    if (k >= goal.size())
        throw Error("when: expected 'when L op R' with op one of > < >= <= == !=");
    Number l = evaluate(goal.subspan(1, k - 1), store);
    Number r = evaluate(goal.subspan(k + 1), store);
    const auto& op = store.deref(goal[k]).as_text().str();
    int cmp;
    if (both_int(l, r)) {
        auto a = std::get<std::int64_t>(l), b = std::get<std::int64_t>(r);
        cmp = a < b ? -1 : (a > b ? 1 : 0);
    } else {
        double a = as_double(l), b = as_double(r);
        if (std::isnan(a) || std::isnan(b))
            return op == "!=";
        cmp = a < b ? -1 : (a > b ? 1 : 0);
    }
    if (op == ">")
        return cmp > 0;
    if (op == "<")
        return cmp < 0;
    if (op == ">=")
        return cmp >= 0;
    if (op == "<=" || op == "=<")
        return cmp <= 0;
    if (op == "==")
        return cmp == 0;
    return cmp != 0;
}

} // namespace natlog
