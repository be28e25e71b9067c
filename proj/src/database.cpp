#include "natlog/database.hpp"

#include "natlog/dcg.hpp"

namespace natlog {

Clause clause_from_item(const SourceItem& item, std::string_view origin) {
    switch (item.kind) {
    case ItemKind::clause:
        if (item.head.arity() == 0)
            throw Error("line " + std::to_string(item.line) + ": empty clause head");
        return Clause{item.head, item.body, item.nvars(), SourceLoc{std::string(origin), item.line}};
    case ItemKind::dcg_rule:
        return translate_rule(item, origin);
    case ItemKind::query:
        break;
    }
    throw Error("line " + std::to_string(item.line) + ": queries cannot be consulted");
}

void Db::consult(std::span<const SourceItem> items, std::string_view origin) {
    // translate everything before touching the index so a bad rule adds nothing
    std::vector<Clause> staged;
    staged.reserve(items.size());
    for (const auto& item : items)
        staged.push_back(clause_from_item(item, origin));
    for (auto& c : staged)
        add(std::move(c));
}

void Db::consult_text(std::string_view text, std::string_view origin) {
    auto items = parse_program(text);
    consult(items, origin);
}

void Db::add(Clause clause) {
    const Clause* c = &clauses_.emplace_back(std::move(clause));
    const std::size_t arity = c->head.arity();
    const Term& lead = c->head[0];

    all_by_arity_[arity].push_back(c);
    if (lead.is_text()) {
        Key key{lead.as_text().key(), arity};
        auto it = by_key_.find(key);
        if (it == by_key_.end()) {
            // a new bucket starts with every earlier wildcard head
            auto wild = wild_by_arity_.find(arity);
            it = by_key_.emplace(key, wild == wild_by_arity_.end() ? std::vector<const Clause*>{} : wild->second)
                     .first;
        }
        it->second.push_back(c);
    } else {
        wild_by_arity_[arity].push_back(c);
        for (auto& [key, bucket] : by_key_)
            if (key.arity == arity)
                bucket.push_back(c);
    }
}

std::span<const Clause* const> Db::candidates(const Term& goal, const Store& store) const {
    const std::size_t arity = goal.arity();
    if (arity == 0)
        return {};
    Term lead = store.deref(goal[0]);
    if (lead.is_text()) {
        auto it = by_key_.find(Key{lead.as_text().key(), arity});
        if (it != by_key_.end())
            return it->second;
        auto wild = wild_by_arity_.find(arity);
        if (wild != wild_by_arity_.end())
            return wild->second;
        return {};
    }
    auto all = all_by_arity_.find(arity);
    if (all != all_by_arity_.end())
        return all->second;
    return {};
}

} // namespace natlog
