#pragma once

#include <deque>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "natlog/reader.hpp"
#include "natlog/terms.hpp"

namespace natlog {

struct SourceLoc {
    std::string origin;
    int line = 0;
};

// Head and body share one variable numbering 0..nvars-1; every use renames
// them into fresh cells.
struct Clause {
    Term head;
    std::vector<Goal> body;
    std::uint32_t nvars = 0;
    SourceLoc source;
};

Clause clause_from_item(const SourceItem& item, std::string_view origin = {});

// Consulted program. Clauses are kept in source order and indexed by
// (leading symbol, head arity); heads that do not start with a symbol are
// candidates for every goal of their arity.
class Db {
public:
    Db() = default;
    Db(const Db&) = delete;
    Db& operator=(const Db&) = delete;
    Db(Db&&) = default;
    Db& operator=(Db&&) = default;

    // Appends clauses in order; grammar rules are translated first. Queries
    // are rejected.
    void consult(std::span<const SourceItem> items, std::string_view origin = {});
    // Parses `text` and consults it; throws if it contains queries.
    void consult_text(std::string_view text, std::string_view origin = {});
    void add(Clause clause);

    // Clauses whose head could unify with `goal`, in source order. The span
    // stays valid until the next add.
    std::span<const Clause* const> candidates(const Term& goal, const Store& store) const;

    std::size_t size() const { return clauses_.size(); }
    const std::deque<Clause>& clauses() const { return clauses_; }

private:
    struct Key {
        const std::string* name;
        std::size_t arity;
        friend bool operator==(const Key&, const Key&) = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            return std::hash<const void*>()(k.name) ^ (k.arity * 0x9e3779b97f4a7c15ULL);
        }
    };

    std::deque<Clause> clauses_;
    std::unordered_map<Key, std::vector<const Clause*>, KeyHash> by_key_;
    std::unordered_map<std::size_t, std::vector<const Clause*>> wild_by_arity_;
    std::unordered_map<std::size_t, std::vector<const Clause*>> all_by_arity_;
};

// Library predicates preloaded into every session unless disabled.
std::string_view library_source();
// Prompt grammar used by the prompt pipeline.
std::string_view prompt_grammar_source();

} // namespace natlog
