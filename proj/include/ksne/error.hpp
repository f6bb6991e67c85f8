#ifndef KSNE_ERROR_HPP
#define KSNE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ksne {

enum class ErrorKind {
    argument,
    parse,
    format,
    validation,
    featurization,
    degenerate,
    unsupported,
    divergence,
    io,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library. `kind` decides how callers react
/// (the CLI maps it onto an exit code).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw Error(ErrorKind::argument, message);
    }
}

}  // namespace ksne

#endif
