#include "natlog/promptgen.hpp"

#include <algorithm>

#include "natlog/machine.hpp"

namespace natlog {

std::string analogy_prompt(std::string_view x, std::string_view y, std::string_view z) {
    std::string p = "given that ";
    p += x;
    p += " relates to ";
    p += y;
    p += " by analogy I would briefly say that ";
    p += z;
    p += " relates to";
    return p;
}

PromptGenerator::PromptGenerator(std::shared_ptr<Completer> completer, std::shared_ptr<const Db> db)
    : completer_(completer ? std::move(completer) : std::make_shared<MockCompleter>()), db_(std::move(db)) {
    if (!db_) {
        auto fresh = std::make_shared<Db>();
        fresh->consult_text(library_source(), "lib.nat");
        fresh->consult_text(prompt_grammar_source(), "prompts.nat");
        db_ = std::move(fresh);
    }
}

std::vector<std::string> PromptGenerator::known_kinds() const {
    std::vector<std::string> kinds;
    for (const auto& c : db_->clauses()) {
        const Term& h = c.head;
        if (h.arity() == 4 && h[0].is_text("prefix") && h[1].is_text()) {
            const auto& k = h[1].as_text().str();
            if (std::find(kinds.begin(), kinds.end(), k) == kinds.end())
                kinds.push_back(k);
        }
    }
    return kinds;
}

std::string PromptGenerator::build_prompt(std::string_view kind, std::string_view question) const {
    if (question.find_first_not_of(" \t\r\n") == std::string_view::npos)
        throw Error("empty question");

    ParsedQuery q;
    q.var_names = {"Ps"};
    q.goals.push_back(Goal{Marker::plain, Term::tuple({Term::text("prompt"), Term::text(kind), Term::text(question),
                                                       Term(Var{0}), Term()})});
    Context ctx;
    ctx.db = db_;
    ctx.registry = std::make_shared<Registry>(default_registry(completer_));
    AnswerStream answers = solve(ctx, q);
    std::optional<QueryEvent> first;
    while ((first = answers.next()) && first->yielded) {
    }
    if (!first) {
        std::string known;
        for (const auto& k : known_kinds())
            known += (known.empty() ? "" : ", ") + k;
        throw Error("unknown prompt kind '" + std::string(kind) + "'; known kinds: " + known);
    }

    Store empty;
    std::string out;
    for (const auto& w : cons_items(first->bindings.at(0).second, empty)) {
        if (!out.empty())
            out += ' ';
        out += display(w, empty);
    }
    return out;
}

std::string PromptGenerator::ask_completer(const std::string& prompt, bool image) const {
    try {
        return image ? completer_->paint(prompt) : completer_->complete(prompt);
    } catch (const std::exception& e) {
        throw Error(std::string("completer failed: ") + e.what() + " [prompt: " + prompt + "]");
    }
}

std::string PromptGenerator::query(std::string_view kind, std::string_view question) const {
    return ask_completer(build_prompt(kind, question), false);
}

std::string PromptGenerator::analogy(std::string_view x, std::string_view y, std::string_view z) const {
    return ask_completer(analogy_prompt(x, y, z), false);
}

std::string PromptGenerator::paint(std::string_view prompt) const {
    if (prompt.find_first_not_of(" \t\r\n") == std::string_view::npos)
        throw Error("empty prompt");
    return ask_completer(std::string(prompt), true);
}

} // namespace natlog
