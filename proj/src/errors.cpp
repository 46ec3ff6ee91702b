#include "fluxinit/errors.hpp"

namespace fluxinit {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ParameterDomain: return "parameter_domain";
        case ErrorKind::Numerical: return "numerical";
        case ErrorKind::NoResonance: return "no_resonance";
        case ErrorKind::DispersiveRegime: return "dispersive_regime";
        case ErrorKind::IndexOutOfRange: return "index_out_of_range";
        case ErrorKind::DegenerateInput: return "degenerate_input";
        case ErrorKind::FitFailure: return "fit_failure";
        case ErrorKind::Validation: return "validation";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

namespace {

std::string join(const std::vector<std::string>& problems) {
    std::string msg = "validation failed:";
    for (const auto& p : problems) msg += " " + p + ";";
    return msg;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : Error(ErrorKind::Validation, join(problems)), problems_(std::move(problems)) {}

}  // namespace fluxinit
