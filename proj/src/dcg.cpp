#include "natlog/dcg.hpp"

namespace natlog {

Clause translate_rule(const SourceItem& rule, std::string_view origin) {
    if (rule.kind != ItemKind::dcg_rule)
        throw Error("translate_rule: not a grammar rule");

    Clause out;
    out.source = {std::string(origin), rule.line};
    VarId next = rule.nvars();
    auto fresh = [&next] { return Term(Var{next++}); };

    const Term start = fresh();
    Term current = start;
    for (const auto& g : rule.body) {
        Term after = fresh();
        if (g.marker == Marker::terminal) {
            for (const auto& w : g.term.items())
                if (!w.ground())
                    throw Error("line " + std::to_string(rule.line) +
                                ": grammar terminal contains a variable: " + render_goal(g, rule.var_names));
            std::vector<Term> words(g.term.items().begin(), g.term.items().end());
            Term list = after;
            for (std::size_t i = words.size(); i-- > 0;)
                list = Term::tuple({words[i], list});
            out.body.push_back(Goal{Marker::plain, Term::tuple({Term::text("eq"), current, list})});
        } else if (g.marker == Marker::plain) {
            std::vector<Term> items(g.term.items().begin(), g.term.items().end());
            items.push_back(current);
            items.push_back(after);
            out.body.push_back(Goal{Marker::plain, Term::tuple(std::move(items))});
        } else {
            throw Error("line " + std::to_string(rule.line) + ": unsupported goal in grammar rule");
        }
        current = after;
    }

    std::vector<Term> head(rule.head.items().begin(), rule.head.items().end());
    head.push_back(start);
    head.push_back(current);
    out.head = Term::tuple(std::move(head));
    out.nvars = next;
    return out;
}

} // namespace natlog
