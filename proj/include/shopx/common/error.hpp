#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace shopx {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PreconditionViolation : public Error {
public:
    using Error::Error;
};

/// A field path plus the reason it failed validation.
struct FieldError {
    std::string path;
    std::string reason;

    bool operator==(const FieldError&) const = default;
};

std::string describe(const std::vector<FieldError>& errors);

class SchemaViolation : public Error {
public:
    explicit SchemaViolation(std::vector<FieldError> errors)
        : Error("schema violation: " + describe(errors)), errors_(std::move(errors)) {}
    SchemaViolation(std::string path, std::string reason)
        : SchemaViolation(std::vector<FieldError>{{std::move(path), std::move(reason)}}) {}

    const std::vector<FieldError>& errors() const noexcept { return errors_; }

private:
    std::vector<FieldError> errors_;
};

} // namespace shopx
