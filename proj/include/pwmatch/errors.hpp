#pragma once

#include <stdexcept>
#include <string>

namespace pwmatch {

/// Failure category. The CLI maps these onto its exit codes.
enum class ErrorKind {
    input,      ///< malformed or inconsistent user input
    numerical,  ///< the computation itself could not proceed
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Schema or validation problem in a spec document; the message starts with the field path.
class SchemaError : public Error {
public:
    SchemaError(const std::string& path, const std::string& what)
        : Error(ErrorKind::input, path + ": " + what), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class ContractViolation : public Error {
public:
    explicit ContractViolation(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

/// |β| below the degeneracy floor; the trigonometric basis collapses to polynomials.
class DegenerateFrequency : public Error {
public:
    explicit DegenerateFrequency(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

/// Energy sits on (or within the floor of) an interval height.
class DegenerateEnergy : public Error {
public:
    explicit DegenerateEnergy(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

class DegeneracyError : public Error {
public:
    explicit DegeneracyError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

/// c(j) + d(j) = 0 for some domain, so the c+d=1 rescaling of corrections is impossible.
class NormalizationObstruction : public Error {
public:
    explicit NormalizationObstruction(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

/// The correction system is singular (or nearly so).
class SingularSystem : public Error {
public:
    explicit SingularSystem(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

class TruncationError : public Error {
public:
    TruncationError(const std::string& what, double residual)
        : Error(ErrorKind::numerical, what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class SequencingError : public Error {
public:
    explicit SequencingError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

class InternalConsistency : public Error {
public:
    explicit InternalConsistency(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

/// Wraps a failure inside the perturbation pipeline with the stage that raised it.
class StageError : public Error {
public:
    StageError(std::string stage, const Error& cause)
        : Error(cause.kind(), stage + ": " + cause.what()), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace pwmatch
