#pragma once

#include <stdexcept>
#include <string>

namespace icelab {

enum class ErrorKind {
    Range,           // index or parameter outside its admissible range
    Config,          // inconsistent configuration (missing label, no spacer symbol, ...)
    Precondition,    // operation precondition violated
    Parameter,       // generator parameters produce an invalid schedule
    Mode,            // operation not defined for this kind of stage
    ClassViolation,  // polynomial coefficients outside the declared class
    Resource,        // request exceeds configured size limits
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace icelab
