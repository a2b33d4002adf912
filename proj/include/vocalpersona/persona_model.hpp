#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vocalpersona/errors.hpp"
#include "vocalpersona/feature_registry.hpp"

namespace vocalpersona {

struct MixtureComponent {
    double weight = 1.0;
    double mean = 0.0;
    double sd = 1.0;

    bool operator==(const MixtureComponent&) const = default;
};

/// Gaussian mixture density of one feature. Each component is truncated to
/// [lo, hi] and renormalized before weighting.
struct FeaturePDF {
    std::string feature_id;
    std::vector<MixtureComponent> components;
    double lo = 0.0;
    double hi = 1.0;

    double density(double z) const;
    double cdf(double z) const;

    bool operator==(const FeaturePDF&) const = default;
};

/// A persona: one PDF per registry feature, in registry order.
struct Persona {
    std::string id;
    std::string name;
    std::vector<std::string> context_tags;
    std::vector<FeaturePDF> pdfs;

    /// Throws UnknownFeatureError.
    const FeaturePDF& pdf(std::string_view feature_id) const;

    bool operator==(const Persona&) const = default;
};

struct PersonaSpace {
    FeatureRegistry registry;
    std::vector<Persona> personas;

    /// Throws UnknownPersonaError.
    const Persona& at(std::string_view persona_id) const;
};

/// Accepted context tags: physical, technological, sociocultural,
/// performative, baseline, or any "custom:<label>".
bool is_valid_context_tag(std::string_view tag);

/// Checks that do not need a registry: normalization, sd > 0, weights >= 0,
/// lo < hi, means inside [lo, hi], finiteness, tags.
ValidationReport validate_persona_shape(const Persona& p);

/// validate_persona_shape plus coverage/order against `reg` and
/// [lo, hi] within the feature's physical bounds.
ValidationReport validate_persona(const FeatureRegistry& reg, const Persona& p);

/// Registry validity, persona validity and id uniqueness.
ValidationReport validate_space(const PersonaSpace& space);

/// True when both personas carry PDFs for the same features in the same order.
bool same_feature_layout(const Persona& a, const Persona& b);

/// Number of grid points used for overlap integration.
inline constexpr std::size_t overlap_grid_points = 2048;

/// Bhattacharyya coefficient of two feature PDFs.
///
/// Both densities are sampled on `overlap_grid_points` equally spaced points
/// over the union of their truncation intervals and integrated with the
/// trapezoid rule:
///
///   BC = T[sqrt(f_a f_b)] / sqrt(T[f_a] T[f_b])
///
/// Dividing by the discretized masses makes BC(f, f) exactly 1 and keeps the
/// result in [0, 1] by Cauchy-Schwarz. When a density is too narrow for the
/// grid to resolve (discrete mass off by more than a factor of two), the
/// coefficient is computed from per-cell probabilities F(x_{i+1}) - F(x_i)
/// instead.
double bhattacharyya(const FeaturePDF& a, const FeaturePDF& b);

/// Geometric mean over features of the per-feature Bhattacharyya coefficient.
/// Throws IncomparableError when the feature layouts differ.
double persona_overlap(const Persona& a, const Persona& b);

/// Point on the segment from `a` (alpha = 0) to `b` (alpha = 1).
///
/// Per feature, components of each side are sorted by mean and paired by
/// rank; the shorter list is padded with zero-weight copies of the longer
/// list's unmatched components. Means, lo and hi interpolate linearly,
/// sds geometrically, weights linearly followed by renormalization. Means are
/// clamped into the blended [lo, hi].
///
/// Throws IncomparableError on layout mismatch, DomainError for alpha
/// outside [0, 1].
Persona blend_personas(const Persona& a, const Persona& b, double alpha);

/// Id given to blended personas: "blend(<a>,<b>,<alpha>)".
std::string blend_id(std::string_view a, std::string_view b, double alpha);

}  // namespace vocalpersona
