#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hydrostate {

/// Base of all domain errors. `kind()` is the stable tag reported in CLI
/// error objects.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual std::string kind() const { return "Error"; }
};

/// Malformed input text (not valid JSON, wrong top-level shape).
class ParseError : public Error {
public:
    using Error::Error;
    [[nodiscard]] std::string kind() const override { return "ParseError"; }
};

/// A well-formed input that violates a domain invariant. `element()` names
/// the offending node, pipe, cell or field.
class ValidationError : public Error {
public:
    ValidationError(std::string element, const std::string& message);
    [[nodiscard]] const std::string& element() const noexcept { return element_; }
    [[nodiscard]] std::string kind() const override { return "ValidationError"; }

private:
    std::string element_;
};

/// Decode failure located by a JSON pointer into the offending document.
class SchemaError : public ValidationError {
public:
    SchemaError(std::string path, std::string expected, std::string found);
    [[nodiscard]] const std::string& path() const noexcept { return element(); }
    [[nodiscard]] const std::string& expected() const noexcept { return expected_; }
    [[nodiscard]] const std::string& found() const noexcept { return found_; }
    [[nodiscard]] std::string kind() const override { return "SchemaError"; }

private:
    std::string expected_;
    std::string found_;
};

class NonConvergence : public Error {
public:
    NonConvergence(int iterations, double residual, const std::string& where);
    [[nodiscard]] int iterations() const noexcept { return iterations_; }
    [[nodiscard]] double residual() const noexcept { return residual_; }
    [[nodiscard]] std::string kind() const override { return "NonConvergence"; }

private:
    int iterations_;
    double residual_;
};

/// The linearized hydraulic block system could not be factorized.
class SingularSystem : public Error {
public:
    using Error::Error;
    [[nodiscard]] std::string kind() const override { return "SingularSystem"; }
};

/// The weighted normal matrix is not positive definite (unobservable state).
class RankDeficient : public Error {
public:
    using Error::Error;
    [[nodiscard]] std::string kind() const override { return "RankDeficient"; }
};

class UnknownTarget : public Error {
public:
    explicit UnknownTarget(std::string id);
    [[nodiscard]] const std::string& id() const noexcept { return id_; }
    [[nodiscard]] std::string kind() const override { return "UnknownTarget"; }

private:
    std::string id_;
};

class PatternOutOfRange : public Error {
public:
    using Error::Error;
    [[nodiscard]] std::string kind() const override { return "PatternOutOfRange"; }
};

class EmptyModel : public Error {
public:
    EmptyModel() : Error("classifier model has no cells") {}
    [[nodiscard]] std::string kind() const override { return "EmptyModel"; }
};

class DegenerateRange : public Error {
public:
    explicit DegenerateRange(std::size_t dimension);
    [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
    [[nodiscard]] std::string kind() const override { return "DegenerateRange"; }

private:
    std::size_t dimension_;
};

}  // namespace hydrostate
