#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "natlog/completer.hpp"
#include "natlog/database.hpp"

namespace natlog {

// "given that X relates to Y by analogy I would briefly say that Z relates to"
std::string analogy_prompt(std::string_view x, std::string_view y, std::string_view z);

// Prompt construction driven by the prompt grammar: a kind selects the
// prefix and suffix rules, the question is spliced in between.
class PromptGenerator {
public:
    // A null db means the library plus the bundled prompt grammar.
    explicit PromptGenerator(std::shared_ptr<Completer> completer, std::shared_ptr<const Db> db = nullptr);

    std::string build_prompt(std::string_view kind, std::string_view question) const;
    std::string query(std::string_view kind, std::string_view question) const;
    std::string analogy(std::string_view x, std::string_view y, std::string_view z) const;
    std::string paint(std::string_view prompt) const;

    // Kinds with a prefix rule, in source order.
    std::vector<std::string> known_kinds() const;

    const std::shared_ptr<const Db>& db() const { return db_; }

private:
    std::string ask_completer(const std::string& prompt, bool image) const;

    std::shared_ptr<Completer> completer_;
    std::shared_ptr<const Db> db_;
};

} // namespace natlog
