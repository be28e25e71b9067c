#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "natlog/terms.hpp"

namespace natlog {

enum class TokenKind {
    word,
    variable,
    integer,
    real,
    quoted,
    lparen,
    rparen,
    colon,
    comma,
    period,
    qmark,
    arrow,
    at,
    hat,
    backquote,
    doublebackquote,
    hash,
};

struct Token {
    TokenKind kind;
    std::string text;
    int line = 1;

    friend bool operator==(const Token&, const Token&) = default;
};

std::string_view token_kind_name(TokenKind kind);

// `%` starts a line comment. Throws SyntaxError on an unterminated quote or a
// character outside the lexical grammar.
std::vector<Token> tokenize(std::string_view text);

// How a goal is executed: `` ` `` fn, ``` `` ``` gen, `#` effect, `^` yield,
// `@` terminal run (grammar rules only).
enum class Marker { plain, fn, gen, effect, yield, terminal };

std::string_view marker_prefix(Marker m);

struct Goal {
    Marker marker = Marker::plain;
    // Always a tuple: the goal's term sequence.
    Term term;
};

enum class ItemKind { clause, dcg_rule, query };

// One parsed item. Variables are numbered 0..var_names.size()-1 in order of
// first occurrence; the item is thus a detached term family.
struct SourceItem {
    ItemKind kind = ItemKind::clause;
    Term head;
    std::vector<Goal> body;
    std::vector<std::string> var_names;
    int line = 1;

    std::uint32_t nvars() const { return static_cast<std::uint32_t>(var_names.size()); }
};

struct ParsedQuery {
    std::vector<Goal> goals;
    std::vector<std::string> var_names;
    int line = 1;

    std::uint32_t nvars() const { return static_cast<std::uint32_t>(var_names.size()); }
};

// Parses exactly one item; trailing tokens are an error.
SourceItem parse_item(std::span<const Token> tokens);

std::vector<SourceItem> parse_program(std::string_view text);

// A query may end in `?` or `.`, may start with `?-`, and may omit the
// terminator at end of input.
ParsedQuery parse_query(std::string_view text);

// Natlog source syntax, re-readable by parse_item.
std::string render_source(const Term& t, std::span<const std::string> var_names);
std::string render_goal(const Goal& g, std::span<const std::string> var_names);
std::string render_item(const SourceItem& item);

// True when `text` reads back as a single word token.
bool is_plain_word(std::string_view text);

} // namespace natlog
