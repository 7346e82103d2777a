#pragma once

#include <stdexcept>
#include <string>

namespace lh {

// Error categories map one-to-one onto the CLI exit codes.
enum class ErrorKind {
    input = 2,      // malformed file, bad option, mask/grid preconditions
    numerical = 3,  // solver failure, divergence, degenerate alignment
    invariant = 4,  // immersion, flattening or coverage violations
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(ErrorKind::input, what) {}
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

class InvariantError : public Error {
public:
    explicit InvariantError(const std::string& what) : Error(ErrorKind::invariant, what) {}
};

// Re-throws `e` as the same class with "stage: " prepended (once).
[[noreturn]] inline void rethrow_tagged(const Error& e, const std::string& stage) {
    const std::string what = e.what();
    const std::string msg = what.rfind(stage + ":", 0) == 0 ? what : stage + ": " + what;
    switch (e.kind()) {
        case ErrorKind::input: throw InputError(msg);
        case ErrorKind::numerical: throw NumericalError(msg);
        case ErrorKind::invariant: throw InvariantError(msg);
    }
    throw Error(e.kind(), msg);
}

}  // namespace lh
