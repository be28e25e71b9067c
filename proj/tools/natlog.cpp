#include <unistd.h>

#include <atomic>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "natlog/cli.hpp"

namespace {

std::atomic<bool> interrupted{false};

extern "C" void on_sigint(int) { interrupted.store(true); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Natlog: a lightweight logic language with natural-language-like syntax"};
    app.require_subcommand(1);

    bool no_lib = false, occurs_check = false, trace = false;
    std::string transcript;
    app.add_flag("--no-lib", no_lib, "do not preload the library");
    app.add_flag("--occurs-check", occurs_check, "unify with the occurs check");
    app.add_flag("--trace", trace, "echo every executed goal to stderr");
    app.add_option("--transcript", transcript, "replay completions from a tab-separated transcript")
        ->check(CLI::ExistingFile);

    std::size_t repl_limit = 0, run_limit = 0, query_limit = 10;
    std::vector<std::filesystem::path> repl_files, run_files, query_files;
    std::string query_text;

    auto* repl = app.add_subcommand("repl", "interactive query loop");
    repl->add_option("-n", repl_limit, "maximum answers per query (0 = unlimited)");
    repl->add_option("files", repl_files, "programs to run before the loop starts");

    auto* run = app.add_subcommand("run", "consult files and run their queries");
    run->add_option("-n", run_limit, "maximum answers per query (0 = unlimited)");
    run->add_option("files", run_files, "programs")->required();

    auto* query = app.add_subcommand("query", "run a single query");
    query->add_option("-n", query_limit, "maximum answers (0 = unlimited)")->capture_default_str();
    query->add_option("text", query_text, "query text, e.g. \"eq X 1?\"")->required();
    query->add_option("files", query_files, "programs to run before the query");

    CLI11_PARSE(app, argc, argv);

    natlog::SessionOptions opts;
    opts.load_library = !no_lib;
    opts.engine.occurs_check = occurs_check;
    opts.engine.trace = trace;
    opts.engine.interrupt = &interrupted;
    try {
        if (!transcript.empty())
            opts.completer = std::make_shared<natlog::RecordedCompleter>(natlog::RecordedCompleter::load(transcript));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    if (repl->parsed()) {
        opts.max_answers = repl_limit;
        natlog::Session session(opts);
        if (!repl_files.empty()) {
            int s = session.run_files(repl_files);
            if (s == 2)
                return s;
        }
        std::signal(SIGINT, on_sigint);
        return session.repl(std::cin, isatty(STDIN_FILENO) != 0);
    }
    if (run->parsed()) {
        natlog::Session session(opts);
        return session.run_files(run_files, run_limit);
    }
    natlog::Session session(opts);
    if (!query_files.empty()) {
        int s = session.run_files(query_files);
        if (s != 0)
            return s;
    }
    return session.query_cmd(query_text, query_limit);
}
