#include "natlog/reader.hpp"

#include <cctype>
#include <charconv>
#include <unordered_map>

namespace natlog {

std::string_view token_kind_name(TokenKind kind) {
    switch (kind) {
    case TokenKind::word: return "word";
    case TokenKind::variable: return "variable";
    case TokenKind::integer: return "int";
    case TokenKind::real: return "float";
    case TokenKind::quoted: return "quoted";
    case TokenKind::lparen: return "'('";
    case TokenKind::rparen: return "')'";
    case TokenKind::colon: return "':'";
    case TokenKind::comma: return "','";
    case TokenKind::period: return "'.'";
    case TokenKind::qmark: return "'?'";
    case TokenKind::arrow: return "'=>'";
    case TokenKind::at: return "'@'";
    case TokenKind::hat: return "'^'";
    case TokenKind::backquote: return "'`'";
    case TokenKind::doublebackquote: return "'``'";
    case TokenKind::hash: return "'#'";
    }
    return "?";
}

std::string_view marker_prefix(Marker m) {
    switch (m) {
    case Marker::plain: return "";
    case Marker::fn: return "`";
    case Marker::gen: return "``";
    case Marker::effect: return "#";
    case Marker::yield: return "^";
    case Marker::terminal: return "@";
    }
    return "";
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_upper(char c) { return (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_lower(char c) { return (c >= 'a' && c <= 'z') || static_cast<unsigned char>(c) >= 0x80; }
bool is_ident(char c) { return is_upper(c) || is_lower(c) || is_digit(c); }
bool is_opchar(char c) {
    static constexpr std::string_view ops = "+-*/<>=!~&|$\\";
    return ops.find(c) != std::string_view::npos;
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : s_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (skip_blank()) {
            char c = s_[i_];
            if (is_digit(c) || ((c == '-' || c == '+') && i_ + 1 < s_.size() && is_digit(s_[i_ + 1]))) {
                out.push_back(number());
            } else if (is_upper(c)) {
                out.push_back(span(TokenKind::variable, is_ident));
            } else if (is_lower(c)) {
                out.push_back(span(TokenKind::word, is_ident));
            } else if (c == '\'') {
                out.push_back(quoted());
            } else if (c == '=' && peek(1) == '>' && !is_opchar(peek(2))) {
                out.push_back(single(TokenKind::arrow, 2));
            } else if (is_opchar(c)) {
                out.push_back(span(TokenKind::word, is_opchar));
            } else if (c == '`') {
                out.push_back(peek(1) == '`' ? single(TokenKind::doublebackquote, 2) : single(TokenKind::backquote, 1));
            } else {
                TokenKind k;
                switch (c) {
                case '(': k = TokenKind::lparen; break;
                case ')': k = TokenKind::rparen; break;
                case ':': k = TokenKind::colon; break;
                case ',': k = TokenKind::comma; break;
                case '.': k = TokenKind::period; break;
                case '?': k = TokenKind::qmark; break;
                case '@': k = TokenKind::at; break;
                case '^': k = TokenKind::hat; break;
                case '#': k = TokenKind::hash; break;
                default:
                    throw SyntaxError(line_, std::string("unexpected character '") + c + "'");
                }
                out.push_back(single(k, 1));
            }
        }
        return out;
    }

private:
    char peek(std::size_t k) const { return i_ + k < s_.size() ? s_[i_ + k] : '\0'; }

    // Skips whitespace and comments; false at end of input.
    bool skip_blank() {
        while (i_ < s_.size()) {
            char c = s_[i_];
            if (c == '\n') {
                ++line_;
                ++i_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++i_;
            } else if (c == '%') {
                while (i_ < s_.size() && s_[i_] != '\n')
                    ++i_;
            } else {
                return true;
            }
        }
        return false;
    }

    Token single(TokenKind k, std::size_t len) {
        Token t{k, std::string(s_.substr(i_, len)), line_};
        i_ += len;
        return t;
    }

    Token span(TokenKind k, bool (*pred)(char)) {
        std::size_t start = i_;
        while (i_ < s_.size() && pred(s_[i_]))
            ++i_;
        return Token{k, std::string(s_.substr(start, i_ - start)), line_};
    }

    Token number() {
        std::size_t start = i_;
        if (s_[i_] == '-' || s_[i_] == '+')
            ++i_;
        while (i_ < s_.size() && is_digit(s_[i_]))
            ++i_;
        bool real = false;
        if (peek(0) == '.' && is_digit(peek(1))) {
            real = true;
            ++i_;
            while (i_ < s_.size() && is_digit(s_[i_]))
                ++i_;
        }
        if ((peek(0) == 'e' || peek(0) == 'E') &&
            (is_digit(peek(1)) || ((peek(1) == '-' || peek(1) == '+') && is_digit(peek(2))))) {
            real = true;
            i_ += 2;
            while (i_ < s_.size() && is_digit(s_[i_]))
                ++i_;
        }
        return Token{real ? TokenKind::real : TokenKind::integer, std::string(s_.substr(start, i_ - start)), line_};
    }

    Token quoted() {
        const int start_line = line_;
        std::size_t end = i_ + 1;
        while (end < s_.size() && s_[end] != '\'' && s_[end] != '\n')
            ++end;
        if (end >= s_.size() || s_[end] != '\'')
            throw SyntaxError(start_line, "unterminated quoted constant");
        Token t{TokenKind::quoted, std::string(s_.substr(i_ + 1, end - i_ - 1)), start_line};
        i_ = end + 1;
        return t;
    }

    std::string_view s_;
    std::size_t i_ = 0;
    int line_ = 1;
};

} // namespace

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

bool is_plain_word(std::string_view text) {
    if (text.empty() || text == "=>")
        return false;
    if (is_lower(text[0])) {
        for (char c : text)
            if (!is_ident(c))
                return false;
        return true;
    }
    if (is_opchar(text[0])) {
        for (char c : text)
            if (!is_opchar(c))
                return false;
        return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

bool ends_goal(TokenKind k) {
    switch (k) {
    case TokenKind::comma:
    case TokenKind::period:
    case TokenKind::qmark:
    case TokenKind::colon:
    case TokenKind::arrow:
        return true;
    default:
        return false;
    }
}

class Parser {
public:
    explicit Parser(std::span<const Token> tokens) : toks_(tokens) {}

    bool at_end() const { return pos_ >= toks_.size(); }

    SourceItem item() {
        vars_.clear();
        names_.clear();
        SourceItem out;
        out.line = line();

        bool query = false;
        if (is(TokenKind::qmark) && is_at(1, TokenKind::word) && toks_[pos_ + 1].text == "-") {
            pos_ += 2;
            query = true;
        }
        if (at_end())
            throw SyntaxError(out.line, query ? "empty query" : "unexpected end of input");
        if (!query && is(TokenKind::colon))
            throw SyntaxError(line(), "empty head");
        if (!query && is(TokenKind::arrow))
            throw SyntaxError(line(), "empty head");

        Goal first = goal(false);
        if (!query && first.marker == Marker::plain && is(TokenKind::colon)) {
            ++pos_;
            out.kind = ItemKind::clause;
            out.head = first.term;
            out.body = goal_list(false);
            if (out.body.empty())
                throw SyntaxError(line(), "empty clause body");
            expect_period("clause");
        } else if (!query && first.marker == Marker::plain && is(TokenKind::arrow)) {
            ++pos_;
            out.kind = ItemKind::dcg_rule;
            out.head = first.term;
            out.body = goal_list(true);
            for (const auto& g : out.body)
                if (g.marker != Marker::plain && g.marker != Marker::terminal)
                    throw SyntaxError(out.line, std::string("'") + std::string(marker_prefix(g.marker)) +
                                                    "' goal inside a grammar rule");
            expect_period("grammar rule");
        } else {
            std::vector<Goal> goals{first};
            while (is(TokenKind::comma)) {
                ++pos_;
                goals.push_back(goal(false));
            }
            if (is(TokenKind::qmark) || (query && is(TokenKind::period))) {
                ++pos_;
                out.kind = ItemKind::query;
                out.body = std::move(goals);
            } else if (is(TokenKind::period)) {
                if (goals.size() > 1)
                    throw SyntaxError(out.line, "a fact cannot contain ',' (end queries with '?')");
                if (first.marker != Marker::plain)
                    throw SyntaxError(out.line, "a fact cannot start with a marker (end queries with '?')");
                ++pos_;
                out.kind = ItemKind::clause;
                out.head = first.term;
            } else if (at_end()) {
                throw SyntaxError(line(), "missing '.' or '?' at end of item");
            } else {
                throw unexpected();
            }
        }
        out.var_names = std::move(names_);
        return out;
    }

    // Query goals, terminator optional at end of input.
    ParsedQuery query() {
        vars_.clear();
        names_.clear();
        ParsedQuery out;
        if (at_end())
            throw SyntaxError(1, "empty query");
        out.line = line();
        if (is(TokenKind::qmark) && is_at(1, TokenKind::word) && toks_[pos_ + 1].text == "-")
            pos_ += 2;
        if (at_end() || is(TokenKind::qmark) || is(TokenKind::period))
            throw SyntaxError(out.line, "empty query");
        out.goals.push_back(goal(false));
        while (is(TokenKind::comma)) {
            ++pos_;
            out.goals.push_back(goal(false));
        }
        if (is(TokenKind::qmark) || is(TokenKind::period))
            ++pos_;
        else if (!at_end())
            throw unexpected();
        if (!at_end())
            throw SyntaxError(line(), "trailing tokens after query terminator");
        out.var_names = std::move(names_);
        return out;
    }

private:
    int line() const {
        if (toks_.empty())
            return 1;
        return pos_ < toks_.size() ? toks_[pos_].line : toks_.back().line;
    }
    bool is(TokenKind k) const { return pos_ < toks_.size() && toks_[pos_].kind == k; }
    bool is_at(std::size_t off, TokenKind k) const {
        return pos_ + off < toks_.size() && toks_[pos_ + off].kind == k;
    }

    SyntaxError unexpected() const {
        if (at_end())
            return SyntaxError(line(), "unexpected end of input");
        const Token& t = toks_[pos_];
        if (t.kind == TokenKind::rparen)
            return SyntaxError(t.line, "unbalanced parentheses: unexpected ')'");
        bool content = t.kind == TokenKind::word || t.kind == TokenKind::variable || t.kind == TokenKind::integer ||
                       t.kind == TokenKind::real || t.kind == TokenKind::quoted;
        return SyntaxError(t.line, "unexpected " + std::string(token_kind_name(t.kind)) +
                                       (content ? " '" + t.text + "'" : ""));
    }

    void expect_period(const char* what) {
        if (is(TokenKind::period)) {
            ++pos_;
            return;
        }
        if (at_end())
            throw SyntaxError(line(), std::string("missing '.' at end of ") + what);
        throw unexpected();
    }

    std::vector<Goal> goal_list(bool grammar) {
        std::vector<Goal> goals;
        if (grammar && is(TokenKind::period))
            return goals;
        goals.push_back(goal(grammar));
        while (is(TokenKind::comma)) {
            ++pos_;
            goals.push_back(goal(grammar));
        }
        return goals;
    }

    Goal goal(bool grammar) {
        Goal g;
        const int at_line = line();
        if (!at_end()) {
            switch (toks_[pos_].kind) {
            case TokenKind::backquote: g.marker = Marker::fn; break;
            case TokenKind::doublebackquote: g.marker = Marker::gen; break;
            case TokenKind::hash: g.marker = Marker::effect; break;
            case TokenKind::hat: g.marker = Marker::yield; break;
            case TokenKind::at:
                if (!grammar)
                    throw SyntaxError(at_line, "'@' terminal outside a grammar rule");
                g.marker = Marker::terminal;
                break;
            default: break;
            }
            if (g.marker != Marker::plain)
                ++pos_;
        }
        std::vector<Term> seq;
        while (!at_end() && !ends_goal(toks_[pos_].kind)) {
            if (is(TokenKind::rparen))
                throw unexpected();
            seq.push_back(element());
        }
        if (seq.empty()) {
            if (at_end())
                throw SyntaxError(line(), "unexpected end of input");
            throw SyntaxError(at_line, "empty goal");
        }
        g.term = Term::tuple(std::move(seq));
        return g;
    }

    Term element() {
        const Token& t = toks_[pos_];
        switch (t.kind) {
        case TokenKind::word:
        case TokenKind::quoted:
            ++pos_;
            return Term::text(t.text);
        case TokenKind::variable:
            ++pos_;
            return variable(t.text);
        case TokenKind::integer: {
            ++pos_;
            std::int64_t v = 0;
            const char* b = t.text.data();
            if (*b == '+')
                ++b;
            auto [p, ec] = std::from_chars(b, t.text.data() + t.text.size(), v);
            if (ec != std::errc() || p != t.text.data() + t.text.size())
                throw SyntaxError(t.line, "integer literal out of range: " + t.text);
            return Term::integer(v);
        }
        case TokenKind::real:
            ++pos_;
            return Term::real(std::stod(t.text));
        case TokenKind::lparen:
            return group();
        default:
            throw unexpected();
        }
    }

    // Parenthesized group; commas between elements are optional separators so
    // that rendered answers read back.
    Term group() {
        const int open_line = line();
        ++pos_;
        std::vector<Term> items;
        bool need_elem = false;
        for (;;) {
            if (at_end() || is(TokenKind::period) || is(TokenKind::qmark))
                throw SyntaxError(open_line, "unbalanced parentheses: missing ')'");
            if (is(TokenKind::rparen)) {
                if (need_elem && items.empty())
                    throw unexpected();
                ++pos_;
                return Term::tuple(std::move(items));
            }
            if (is(TokenKind::comma)) {
                if (items.empty() || need_elem)
                    throw unexpected();
                ++pos_;
                need_elem = true;
                continue;
            }
            items.push_back(element());
            need_elem = false;
        }
    }

    Term variable(const std::string& name) {
        if (name == "_") {
            names_.push_back(name);
            return Var{static_cast<VarId>(names_.size() - 1)};
        }
        auto [it, inserted] = vars_.emplace(name, static_cast<VarId>(names_.size()));
        if (inserted)
            names_.push_back(name);
        return Var{it->second};
    }

    std::span<const Token> toks_;
    std::size_t pos_ = 0;
    std::unordered_map<std::string, VarId> vars_;
    std::vector<std::string> names_;
};

} // namespace

SourceItem parse_item(std::span<const Token> tokens) {
    Parser p(tokens);
    SourceItem item = p.item();
    if (!p.at_end())
        throw SyntaxError(tokens.back().line, "trailing tokens after item");
    return item;
}

std::vector<SourceItem> parse_program(std::string_view text) {
    auto tokens = tokenize(text);
    Parser p(tokens);
    std::vector<SourceItem> items;
    while (!p.at_end())
        items.push_back(p.item());
    return items;
}

ParsedQuery parse_query(std::string_view text) {
    auto tokens = tokenize(text);
    Parser p(tokens);
    return p.query();
}

// ---------------------------------------------------------------------------
// Source rendering

namespace {

void source_elem(std::string& out, const Term& t, std::span<const std::string> names) {
    switch (t.kind()) {
    case TermKind::var: {
        auto id = t.as_var().id;
        out += id < names.size() ? names[id] : "_G" + std::to_string(id);
        break;
    }
    case TermKind::integer: out += std::to_string(t.as_int()); break;
    case TermKind::real: out += render_float(t.as_real()); break;
    case TermKind::text: {
        const auto& s = t.as_text().str();
        if (is_plain_word(s))
            out += s;
        else
            out += "'" + s + "'";
        break;
    }
    case TermKind::tuple: {
        out += '(';
        bool first = true;
        for (const auto& x : t.items()) {
            if (!first)
                out += ' ';
            first = false;
            source_elem(out, x, names);
        }
        out += ')';
        break;
    }
    case TermKind::host: out += render(t); break;
    }
}

void source_seq(std::string& out, const Term& t, std::span<const std::string> names) {
    bool first = true;
    for (const auto& x : t.items()) {
        if (!first)
            out += ' ';
        first = false;
        source_elem(out, x, names);
    }
}

} // namespace

std::string render_source(const Term& t, std::span<const std::string> var_names) {
    std::string out;
    source_elem(out, t, var_names);
    return out;
}

std::string render_goal(const Goal& g, std::span<const std::string> var_names) {
    std::string out(marker_prefix(g.marker));
    source_seq(out, g.term, var_names);
    return out;
}

std::string render_item(const SourceItem& item) {
    std::string out;
    auto body = [&] {
        for (std::size_t i = 0; i < item.body.size(); ++i) {
            if (i)
                out += ", ";
            out += render_goal(item.body[i], item.var_names);
        }
    };
    switch (item.kind) {
    case ItemKind::query:
        out += "?- ";
        body();
        out += '?';
        break;
    case ItemKind::clause:
        source_seq(out, item.head, item.var_names);
        if (!item.body.empty()) {
            out += " : ";
            body();
        }
        out += '.';
        break;
    case ItemKind::dcg_rule:
        source_seq(out, item.head, item.var_names);
        out += " =>";
        if (!item.body.empty()) {
            out += ' ';
            body();
        }
        out += '.';
        break;
    }
    return out;
}

} // namespace natlog
