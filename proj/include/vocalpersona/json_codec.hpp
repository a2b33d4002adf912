#pragma once

#include <json.hpp>

#include "vocalpersona/control_service.hpp"
#include "vocalpersona/persona_store.hpp"
#include "vocalpersona/render_backend.hpp"
#include "vocalpersona/sampler.hpp"

// JSON shapes shared by the .persona file format and the HTTP API.
namespace vocalpersona::codec {

using nlohmann::json;

json to_json(const FeatureSpec& f);
json to_json(const FeatureRegistry& reg);
json to_json(const MixtureComponent& c);
json to_json(const FeaturePDF& pdf);
json to_json(const Persona& p);
json to_json(const MacroChannel& ch);
json to_json(const Macro& m);
json to_json(const PersonaBundle& b);

/// {"persona_id", "seed", "values": {feature_id: value, ...}, "order": [ids]}
json to_json(const FeatureSample& s, const FeatureRegistry& reg);

json to_json(const ValidationReport& report);

/// {"session_id", "active": {"persona_id"} | {"a", "b", "alpha"},
///  "macro_values": {id: x}, "seed_counter"}
json to_json(const SessionState& s);

json to_json(const ActiveSelection& sel);

/// {"feature_id", "x", "pre", "post"}
json to_json(const CurvePair& c);

/// Accepts {"persona_id": id} or {"a": id, "b": id, "alpha": x}.
ActiveSelection selection_from_json(const json& j);

// Strict readers: unknown keys, missing keys and wrong types throw
// ParseError naming the JSON path. Line/column are reported when the caller
// passes the source text.
FeatureRegistry registry_from_json(const json& j);
Persona persona_from_json(const json& j);
Macro macro_from_json(const json& j);

/// Also checks format_version before anything else.
PersonaBundle bundle_from_json(const json& j, std::string_view source_text = {});

}  // namespace vocalpersona::codec
