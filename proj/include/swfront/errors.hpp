#pragma once

#include <stdexcept>
#include <string>

namespace swfront {

// Two families: user-facing input problems (bad config, failed hypotheses,
// violated preconditions) and numerical failures. The CLI maps the first to
// exit code 2 and the second to exit code 3.

class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }
    virtual bool is_numerical() const noexcept { return false; }

private:
    std::string kind_;
};

class InputError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
    bool is_numerical() const noexcept override { return true; }
};

class ValidationError : public InputError {
public:
    explicit ValidationError(const std::string& what) : InputError("ValidationError", what) {}
};

class ParameterError : public InputError {
public:
    explicit ParameterError(const std::string& what) : InputError("ParameterError", what) {}
};

class PreconditionError : public InputError {
public:
    explicit PreconditionError(const std::string& what) : InputError("PreconditionError", what) {}
};

class AmbiguousClass : public InputError {
public:
    explicit AmbiguousClass(const std::string& what) : InputError("AmbiguousClass", what) {}
};

class ConfigError : public InputError {
public:
    explicit ConfigError(const std::string& what) : InputError("ConfigError", what) {}
};

/// Malformed JSON in a config file.
class JsonSyntaxError : public InputError {
public:
    JsonSyntaxError(const std::string& what, std::size_t byte)
        : InputError("SyntaxError", what), byte_(byte) {}
    std::size_t byte() const noexcept { return byte_; }

private:
    std::size_t byte_;
};

class DomainError : public NumericalError {
public:
    explicit DomainError(const std::string& what) : NumericalError("DomainError", what) {}
};

class StepFloorError : public NumericalError {
public:
    StepFloorError(const std::string& what, double phi, double stiffness)
        : NumericalError("StepFloorError", what), phi_(phi), stiffness_(stiffness) {}
    double phi() const noexcept { return phi_; }
    double stiffness() const noexcept { return stiffness_; }

private:
    double phi_;
    double stiffness_;
};

class NoConvergence : public NumericalError {
public:
    explicit NoConvergence(const std::string& what) : NumericalError("NoConvergence", what) {}
};

class BracketError : public NumericalError {
public:
    explicit BracketError(const std::string& what) : NumericalError("BracketError", what) {}
};

class InconsistentPredicate : public NumericalError {
public:
    explicit InconsistentPredicate(const std::string& what)
        : NumericalError("InconsistentPredicate", what) {}
};

class QuadratureError : public NumericalError {
public:
    explicit QuadratureError(const std::string& what) : NumericalError("QuadratureError", what) {}
};

class OracleBlowup : public NumericalError {
public:
    explicit OracleBlowup(const std::string& what) : NumericalError("OracleBlowup", what) {}
};

}  // namespace swfront
