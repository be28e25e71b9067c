#pragma once

#include <stdexcept>
#include <string>

namespace natlog {

// Base of every error the interpreter reports to its caller. Logic failure is
// never an error; it is a value returned by the machine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
    SyntaxError(int line, const std::string& message)
        : Error("line " + std::to_string(line) + ": " + message), line_(line), message_(message) {}

    int line() const { return line_; }
    const std::string& message() const { return message_; }

private:
    int line_;
    std::string message_;
};

} // namespace natlog
