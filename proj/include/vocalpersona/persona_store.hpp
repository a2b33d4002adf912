#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vocalpersona/errors.hpp"
#include "vocalpersona/feature_registry.hpp"
#include "vocalpersona/macro_engine.hpp"
#include "vocalpersona/persona_model.hpp"

namespace vocalpersona {

inline constexpr int current_format_version = 1;

/// Everything a session needs, cross-validated as a unit.
struct PersonaBundle {
    int format_version = current_format_version;
    FeatureRegistry registry;
    std::vector<Persona> personas;
    std::vector<Macro> macros;

    /// Throws UnknownPersonaError.
    const Persona& persona(std::string_view id) const;

    bool operator==(const PersonaBundle&) const = default;
};

/// Registry, personas (plus unique ids) and macro library against the
/// registry. An empty persona list is allowed here; sessions reject it.
ValidationReport validate_bundle(const PersonaBundle& b);

/// Canonical text form: JSON, keys sorted, two-space indent, trailing newline,
/// doubles in shortest round-trip notation. Throws ValidationError.
std::string serialize_bundle(const PersonaBundle& b);

/// Throws ParseError (with line/column), UnsupportedVersionError,
/// ValidationError.
PersonaBundle parse_bundle(std::string_view text);

/// Validates, serializes, then writes via a temporary file renamed over
/// `path`. Nothing is written when validation fails. Throws ValidationError,
/// StorageError. Concurrent writers to one path are not coordinated.
void save_bundle(const PersonaBundle& b, const std::filesystem::path& path);

/// Throws StorageError when the file cannot be read, otherwise as parse_bundle.
PersonaBundle load_bundle(const std::filesystem::path& path);

/// Illustrative starter personas for the default registry: "baseline",
/// "meeting_with_clients", "chatting_with_family", "delivering_a_speech".
/// Parameters are hand-authored, not fitted to recordings.
std::vector<Persona> build_starter_personas();

/// Default registry + starter personas + default macro library.
PersonaBundle build_starter_bundle();

}  // namespace vocalpersona
