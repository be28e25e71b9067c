#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>

namespace natlog {

// The boundary between prompt construction and a text (or image) model.
// Implementations must tolerate serial calls from one thread.
class Completer {
public:
    virtual ~Completer() = default;

    virtual std::string complete(std::string_view prompt) = 0;

    // Image endpoint; returns a URL-like token. The default has none.
    virtual std::string paint(std::string_view prompt);
};

// Deterministic stand-in: "MOCK[<prompt>]" and "mock://image/<hex>".
class MockCompleter final : public Completer {
public:
    std::string complete(std::string_view prompt) override;
    std::string paint(std::string_view prompt) override;
};

// Replays prompt/completion pairs. Transcript format: one record per line,
// prompt and completion separated by a tab. Blank lines and lines starting
// with '#' are skipped.
class RecordedCompleter final : public Completer {
public:
    static RecordedCompleter from_text(std::string_view text);
    static RecordedCompleter load(const std::filesystem::path& path);

    std::string complete(std::string_view prompt) override;
    std::string paint(std::string_view prompt) override;

    std::size_t size() const { return records_.size(); }

private:
    std::map<std::string, std::string, std::less<>> records_;
};

// Hook for embedders attaching a real backend.
class CallbackCompleter final : public Completer {
public:
    using Fn = std::function<std::string(std::string_view)>;

    explicit CallbackCompleter(Fn complete, Fn paint = {}) : complete_(std::move(complete)), paint_(std::move(paint)) {}

    std::string complete(std::string_view prompt) override { return complete_(prompt); }
    std::string paint(std::string_view prompt) override;

private:
    Fn complete_;
    Fn paint_;
};

// 64-bit FNV-1a, hex encoded.
std::string stable_hash_hex(std::string_view text);

} // namespace natlog
