#include "vocalpersona/errors.hpp"

#include <sstream>

namespace vocalpersona {

std::string format_violation(const Violation& v)
{
    std::string out = v.subject;
    if (!v.feature_id.empty()) {
        out += (out.empty() ? "" : "/") + v.feature_id;
    }
    if (!out.empty()) {
        out += ": ";
    }
    return out + v.rule + ": " + v.message;
}

namespace {

std::string summarize(const ValidationReport& report)
{
    std::ostringstream os;
    os << "validation failed (" << report.size() << " violation"
       << (report.size() == 1 ? "" : "s") << ")";
    for (const auto& v : report) {
        os << "\n  " << format_violation(v);
    }
    return os.str();
}

}  // namespace

ValidationError::ValidationError(ValidationReport report)
    : Error(summarize(report)), report_(std::move(report))
{
}

UnknownMacroError::UnknownMacroError(const std::string& id) : Error("unknown macro '" + id + "'") {}

UnknownPersonaError::UnknownPersonaError(const std::string& id)
    : Error("unknown persona '" + id + "'")
{
}

UnknownFeatureError::UnknownFeatureError(const std::string& id)
    : Error("unknown feature '" + id + "'")
{
}

UnknownSessionError::UnknownSessionError(const std::string& id)
    : Error("unknown session '" + id + "'")
{
}

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : Error("parse error at line " + std::to_string(line) + ", column " + std::to_string(column)
            + ": " + what),
      line_(line),
      column_(column)
{
}

UnsupportedVersionError::UnsupportedVersionError(long long version)
    : Error("unsupported format_version " + std::to_string(version) + " (this build reads version 1)"),
      version_(version)
{
}

}  // namespace vocalpersona
