#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vocalpersona {

/// One broken invariant. Validators return these as data; they only become
/// exceptions when an operation cannot proceed.
struct Violation {
    std::string subject;     // persona / macro / registry id the rule applies to
    std::string feature_id;  // empty when not feature-specific
    std::string rule;        // stable machine-readable rule code
    std::string message;

    bool operator==(const Violation&) const = default;
};

using ValidationReport = std::vector<Violation>;

/// "subject/feature: rule: message"
std::string format_violation(const Violation& v);

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
  public:
    explicit ValidationError(ValidationReport report);
    const ValidationReport& report() const noexcept { return report_; }

  private:
    ValidationReport report_;
};

/// Argument outside its documented domain (macro value, blend alpha, ...).
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Two objects built against different registries.
class IncomparableError : public Error {
  public:
    using Error::Error;
};

class UnknownMacroError : public Error {
  public:
    explicit UnknownMacroError(const std::string& id);
};

class UnknownPersonaError : public Error {
  public:
    explicit UnknownPersonaError(const std::string& id);
};

class UnknownFeatureError : public Error {
  public:
    explicit UnknownFeatureError(const std::string& id);
};

class UnknownSessionError : public Error {
  public:
    explicit UnknownSessionError(const std::string& id);
};

class ParseError : public Error {
  public:
    ParseError(const std::string& what, std::size_t line, std::size_t column);
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

class UnsupportedVersionError : public Error {
  public:
    explicit UnsupportedVersionError(long long version);
    long long version() const noexcept { return version_; }

  private:
    long long version_;
};

class StorageError : public Error {
  public:
    using Error::Error;
};

class ConfigurationError : public Error {
  public:
    using Error::Error;
};

}  // namespace vocalpersona
