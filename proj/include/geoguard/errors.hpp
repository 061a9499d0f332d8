// Exception types shared by every geoguard module.
#pragma once

#include <stdexcept>
#include <string>

namespace geoguard {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The scenario violates a structural requirement (sensor inside the ROI,
/// broken probability ordering, wrong number of secure sensors, ...).
class InvalidScenario : public Error {
public:
    using Error::Error;
};

class EmptyData : public Error {
public:
    using Error::Error;
};

/// An attack variant was handed to an operation that cannot apply it.
class VariantMismatch : public Error {
public:
    using Error::Error;
};

class NoIntersection : public Error {
public:
    using Error::Error;
};

class MissingSensorData : public Error {
public:
    using Error::Error;
};

/// Malformed input document. `where()` names the line or the field path.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::string where)
        : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}

    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

}  // namespace geoguard
