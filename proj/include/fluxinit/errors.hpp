#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fluxinit {

/// Error categories surfaced in machine-readable CLI error records.
enum class ErrorKind {
    ParameterDomain,
    Numerical,
    NoResonance,
    DispersiveRegime,
    IndexOutOfRange,
    DegenerateInput,
    FitFailure,
    Validation,
    Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Carries every violated invariant, not just the first.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

}  // namespace fluxinit
