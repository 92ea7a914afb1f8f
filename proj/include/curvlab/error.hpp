#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace curvlab {

enum class ErrorKind {
    ModelConstraint,
    SingularGradient,
    Precondition,
    Degenerate,
    HypothesisViolation,
    NotAShrinker,
    Support,
    Tracing,
    Evaluation,
    Config,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library. The kind separates configuration and
/// hypothesis problems (which never count as an inequality failure) from the rest.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::map<std::string, double> details = {})
        : std::runtime_error(message), kind_(kind), details_(std::move(details)) {}

    ErrorKind kind() const { return kind_; }
    const std::map<std::string, double>& details() const { return details_; }

private:
    ErrorKind kind_;
    std::map<std::string, double> details_;
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::ModelConstraint: return "model_constraint";
    case ErrorKind::SingularGradient: return "singular_gradient";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Degenerate: return "degenerate_immersion";
    case ErrorKind::HypothesisViolation: return "hypothesis_violation";
    case ErrorKind::NotAShrinker: return "not_a_shrinker";
    case ErrorKind::Support: return "support";
    case ErrorKind::Tracing: return "tracing";
    case ErrorKind::Evaluation: return "evaluation";
    case ErrorKind::Config: return "config";
    }
    return "unknown";
}

} // namespace curvlab
