#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vocalpersona/errors.hpp"
#include "vocalpersona/feature_registry.hpp"
#include "vocalpersona/persona_model.hpp"

namespace vocalpersona {

/// Lowest and highest macro control values. x = 0 is the neutral setting.
inline constexpr double macro_min_value = 0.0;
inline constexpr double macro_max_value = 100.0;

enum class TransformKind { linear, exponential };

std::string_view to_string(TransformKind kind);
/// Throws DomainError for anything but "linear" / "exponential".
TransformKind transform_kind_from_string(std::string_view s);

/// y(x) with y(0) = 1.
///   linear:       1 + a x / 100   (a > -1 keeps it positive on [0, 100])
///   exponential:  exp(a x / 100)
struct TransformSpec {
    TransformKind kind = TransformKind::exponential;
    double sensitivity = 0.0;

    double base(double x) const;

    bool operator==(const TransformSpec&) const = default;
};

enum class MacroTarget { mean, sd };

std::string_view to_string(MacroTarget t);
MacroTarget macro_target_from_string(std::string_view s);

struct MacroChannel {
    std::string feature_id;
    double involvement = 1.0;  // w; 0 leaves the feature untouched
    TransformSpec transform;
    std::vector<MacroTarget> targets{MacroTarget::mean};

    bool targets_mean() const;
    bool targets_sd() const;

    bool operator==(const MacroChannel&) const = default;
};

struct Macro {
    std::string id;
    std::string name;
    std::vector<MacroChannel> channels;

    /// Channel for `feature_id`, or nullptr when the macro does not involve it.
    const MacroChannel* channel_for(std::string_view feature_id) const;

    bool operator==(const Macro&) const = default;
};

struct MacroSetting {
    std::string macro_id;
    double value = 0.0;

    bool operator==(const MacroSetting&) const = default;
};

using MacroSet = std::vector<MacroSetting>;

/// Channel invariants against `reg`: known feature, one channel per feature,
/// non-empty targets, finite parameters, linear sensitivity > -1.
ValidationReport validate_macro(const FeatureRegistry& reg, const Macro& m);

/// validate_macro for every macro plus unique ids.
ValidationReport validate_macro_library(const FeatureRegistry& reg, std::span<const Macro> library);

/// Unique macro ids and values in [0, 100].
ValidationReport validate_macro_set(const MacroSet& set);

/// Channel factor base(x)^w.
///
/// Returns exactly 1 when x == 0 or w == 0. Throws DomainError for x outside
/// [0, 100].
double macro_factor(const MacroChannel& ch, double x);

/// Applies a macro set to a persona.
///
/// For each feature, every component's targeted parameters are scaled by the
/// product of the matching channel factors and then clamped once: means to
/// [lo, hi], sds to [1e-6 (hi - lo), hi - lo]. A parameter whose factor is exactly 1 is
/// copied untouched, so an all-zero macro set returns the input bit for bit.
/// Weights, truncation bounds, ids and tags are never modified.
///
/// Throws UnknownMacroError for unresolved settings, IncomparableError when
/// the persona does not match `reg`, DomainError for out-of-range values.
Persona apply_macros(const Persona& p, std::span<const Macro> library, const MacroSet& set,
                     const FeatureRegistry& reg);

/// Four macros for the default registry: "stern", "bright", "soft", "lively".
std::vector<Macro> build_default_macro_library(const FeatureRegistry& reg);

/// Throws UnknownMacroError.
const Macro& find_macro(std::span<const Macro> library, std::string_view id);

}  // namespace vocalpersona
