#include "natlog/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace natlog {

namespace {

std::string read_file(const std::filesystem::path& path, bool& ok) {
    std::ifstream in(path, std::ios::binary);
    ok = static_cast<bool>(in);
    if (!ok)
        return {};
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ParsedQuery as_query(const SourceItem& item) { return ParsedQuery{item.body, item.var_names, item.line}; }

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

} // namespace

Session::Session(SessionOptions options) : Session(std::move(options), std::cout, std::cerr) {}

Session::Session(SessionOptions options, std::ostream& out, std::ostream& err)
    : options_(std::move(options)), db_(std::make_shared<Db>()), out_(&out), err_(&err) {
    if (!options_.completer)
        options_.completer = std::make_shared<MockCompleter>();
    registry_ = std::make_shared<Registry>(default_registry(options_.completer));
    if (options_.load_library)
        db_->consult_text(library_source(), "lib.nat");
}

Context Session::context() const {
    Context ctx;
    ctx.db = db_;
    ctx.registry = registry_;
    ctx.options = options_.engine;
    ctx.out = out_;
    ctx.err = err_;
    return ctx;
}

void Session::consult_text(std::string_view text, std::string_view origin) { db_->consult_text(text, origin); }

std::size_t Session::run_query(const ParsedQuery& query, std::size_t limit) {
    if (options_.engine.interrupt)
        options_.engine.interrupt->store(false);
    AnswerStream stream = solve(context(), query);
    std::size_t answers = 0, events = 0;
    while (limit == 0 || events < limit) {
        auto ev = stream.next();
        if (!ev)
            break;
        ++events;
        if (!ev->yielded)
            ++answers;
        *out_ << format_event(*ev) << '\n';
    }
    if (answers == 0)
        *out_ << "NO\n";
    out_->flush();
    return answers;
}

int Session::run_file(const std::filesystem::path& path, std::size_t limit) {
    bool ok = false;
    std::string text = read_file(path, ok);
    if (!ok) {
        *err_ << "error: cannot open " << path.string() << '\n';
        return 2;
    }
    const std::string origin = path.string();
    std::vector<SourceItem> items;
    try {
        items = parse_program(text);
    } catch (const SyntaxError& e) {
        *err_ << origin << ':' << e.line() << ": syntax error: " << e.message() << '\n';
        return 1;
    }

    std::vector<SourceItem> clauses;
    for (const auto& it : items)
        if (it.kind != ItemKind::query)
            clauses.push_back(it);
    try {
        db_->consult(clauses, origin);
    } catch (const Error& e) {
        *err_ << origin << ": error: " << e.what() << '\n';
        return 1;
    }

    int status = 0;
    for (const auto& it : items) {
        if (it.kind != ItemKind::query)
            continue;
        try {
            run_query(as_query(it), limit);
        } catch (const Error& e) {
            out_->flush();
            *err_ << origin << ':' << it.line << ": error: " << e.what() << '\n';
            status = 1;
        }
    }
    return status;
}

int Session::run_files(std::span<const std::filesystem::path> paths, std::size_t limit) {
    int status = 0;
    for (const auto& p : paths) {
        int s = run_file(p, limit);
        if (s == 2)
            return 2;
        status = std::max(status, s);
    }
    return status;
}

int Session::query_cmd(std::string_view text, std::size_t limit) {
    try {
        return run_query(parse_query(text), limit) > 0 ? 0 : 1;
    } catch (const SyntaxError& e) {
        *err_ << "query:" << e.line() << ": syntax error: " << e.message() << '\n';
    } catch (const Error& e) {
        out_->flush();
        *err_ << "error: " << e.what() << '\n';
    }
    return 1;
}

int Session::repl(std::istream& in, bool interactive) {
    std::string buffer, line;
    auto prompt = [&] {
        if (interactive)
            *out_ << (buffer.empty() ? "?- " : "|  ") << std::flush;
    };
    int status = 0;
    prompt();
    while (std::getline(in, line)) {
        buffer += line;
        buffer += '\n';
        std::string text = trim(buffer);
        if (text.empty()) {
            buffer.clear();
            prompt();
            continue;
        }
        if (text == "halt" || text == "halt." || text == "halt?")
            return status;
        if (text.back() != '?' && text.back() != '.') {
            prompt();
            continue;
        }
        buffer.clear();
        try {
            run_query(parse_query(text), options_.max_answers);
        } catch (const SyntaxError& e) {
            *err_ << "syntax error: line " << e.line() << ": " << e.message() << '\n';
            status = 1;
        } catch (const Error& e) {
            out_->flush();
            *err_ << "error: " << e.what() << '\n';
            status = 1;
        }
        prompt();
    }
    if (!trim(buffer).empty()) {
        try {
            run_query(parse_query(buffer), options_.max_answers);
        } catch (const Error& e) {
            *err_ << "error: " << e.what() << '\n';
            status = 1;
        }
    }
    return status;
}

} // namespace natlog
