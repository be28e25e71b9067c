#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "natlog/completer.hpp"
#include "natlog/database.hpp"
#include "natlog/machine.hpp"

namespace natlog {

struct SessionOptions {
    // 0 means unlimited.
    std::size_t max_answers = 0;
    bool load_library = true;
    Options engine;
    // Null means MockCompleter.
    std::shared_ptr<Completer> completer;
};

// A consulted program plus the sinks answers and errors go to. Consults
// accumulate over the session's lifetime.
class Session {
public:
    explicit Session(SessionOptions options = {});
    Session(SessionOptions options, std::ostream& out, std::ostream& err);

    void consult_text(std::string_view text, std::string_view origin = {});

    // Prints one line per answer or yield, or NO when there are no answers.
    // Returns the number of answers; throws Error when the query fails with
    // an error.
    std::size_t run_query(const ParsedQuery& query, std::size_t limit);

    // Consults the file's clauses, then runs its queries in order.
    // 0 on success, 1 on a syntax or query error, 2 when the file is missing.
    int run_file(const std::filesystem::path& path, std::size_t limit = 0);
    // Files in order; the first missing file stops the run.
    int run_files(std::span<const std::filesystem::path> paths, std::size_t limit = 0);

    // 0 if the query has at least one answer, 1 otherwise.
    int query_cmd(std::string_view text, std::size_t limit);

    // Reads queries terminated by '?' or '.' until end of input or `halt`.
    // The prompt is shown only when `interactive` is set.
    int repl(std::istream& in, bool interactive);

    Context context() const;
    const Db& db() const { return *db_; }
    const SessionOptions& options() const { return options_; }

private:
    SessionOptions options_;
    std::shared_ptr<Db> db_;
    std::shared_ptr<const Registry> registry_;
    std::ostream* out_;
    std::ostream* err_;
};

} // namespace natlog
