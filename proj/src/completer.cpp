#include "natlog/completer.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "natlog/error.hpp"

namespace natlog {

std::string Completer::paint(std::string_view) { throw Error("this completer has no image endpoint"); }

std::string MockCompleter::complete(std::string_view prompt) { return "MOCK[" + std::string(prompt) + "]"; }

std::string MockCompleter::paint(std::string_view prompt) { return "mock://image/" + stable_hash_hex(prompt); }

RecordedCompleter RecordedCompleter::from_text(std::string_view text) {
    RecordedCompleter rc;
    std::size_t pos = 0;
    int line = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view rec = text.substr(pos, end - pos);
        ++line;
        pos = end + 1;
        if (!rec.empty() && rec.back() == '\r')
            rec.remove_suffix(1);
        if (rec.empty() || rec.front() == '#')
            continue;
        std::size_t tab = rec.find('\t');
        if (tab == std::string_view::npos)
            throw Error("transcript line " + std::to_string(line) + ": missing tab separator");
        rc.records_.insert_or_assign(std::string(rec.substr(0, tab)), std::string(rec.substr(tab + 1)));
    }
    return rc;
}

RecordedCompleter RecordedCompleter::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open transcript " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

std::string RecordedCompleter::complete(std::string_view prompt) {
    auto it = records_.find(prompt);
    if (it == records_.end())
        throw Error("no recorded completion for prompt: " + std::string(prompt));
    return it->second;
}

// Image records share the table: the prompt maps to a URL-like token.
std::string RecordedCompleter::paint(std::string_view prompt) { return complete(prompt); }

std::string CallbackCompleter::paint(std::string_view prompt) {
    if (!paint_)
        return Completer::paint(prompt);
    return paint_(prompt);
}

std::string stable_hash_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace natlog
