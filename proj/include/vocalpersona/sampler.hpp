#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vocalpersona/counter_rng.hpp"
#include "vocalpersona/persona_model.hpp"

namespace vocalpersona {

/// One realized draw z = (z_1 .. z_N), in the persona's feature order.
struct FeatureSample {
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::string persona_id;

    bool operator==(const FeatureSample&) const = default;
};

struct Trajectory {
    std::vector<FeatureSample> segments;
    double smoothing = 0.0;
};

struct FeatureDraw {
    double value;
    std::size_t component;
};

/// Draws one value from `pdf`: the component is selected with u0 against the
/// cumulative weights, then the value is the truncated-normal inverse CDF
/// at u1. Both uniforms come from draw `index` of `stream`.
FeatureDraw draw_feature(const FeaturePDF& pdf, const RngStream& stream, std::uint64_t index = 0);

/// Independent per-feature draw. Feature n reads stream n of `seed`, so the
/// value of feature n never depends on how many features follow it.
/// `index` selects the draw within each stream (0 for one-shot sampling).
///
/// Throws ValidationError when the persona violates its PDF invariants.
FeatureSample sample_features(const Persona& p, std::uint64_t seed, std::uint64_t index = 0);

/// `n_segments` draws (segment i uses draw index i) smoothed by the
/// recurrence t_1 = s_1, t_i = lambda t_{i-1} + (1 - lambda) s_i.
///
/// Throws DomainError for n_segments == 0 or lambda outside [0, 1].
Trajectory sample_trajectory(const Persona& p, std::size_t n_segments, double lambda, std::uint64_t seed);

}  // namespace vocalpersona
