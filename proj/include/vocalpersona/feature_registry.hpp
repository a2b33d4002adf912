#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vocalpersona/errors.hpp"

namespace vocalpersona {

/// One low-level synthesis feature with its unit and hard physical bounds.
struct FeatureSpec {
    std::string id;
    std::string name;
    std::string unit;
    double min = 0.0;
    double max = 1.0;
    std::string description;

    bool operator==(const FeatureSpec&) const = default;
};

/// Ordered feature set. The position of a feature in `features` is its index n
/// everywhere else (persona PDFs, samples, CSV columns).
struct FeatureRegistry {
    std::vector<FeatureSpec> features;
    int version = 1;

    std::size_t size() const noexcept { return features.size(); }

    /// Index of `id`, or nullopt.
    std::optional<std::size_t> index_of(std::string_view id) const;

    /// Throws UnknownFeatureError.
    const FeatureSpec& at(std::string_view id) const;

    bool operator==(const FeatureRegistry&) const = default;
};

/// The canonical eight-feature registry:
///
/// | id            | unit              | bounds      |
/// |---------------|-------------------|-------------|
/// | f0_mean       | Hz                | 50 .. 400   |
/// | f0_range      | semitones         | 0 .. 24     |
/// | speech_rate   | syllables/second  | 1 .. 10     |
/// | pause_scale   | ratio             | 0.25 .. 4   |
/// | loudness      | dB                | -20 .. 20   |
/// | spectral_tilt | dB/octave         | -24 .. 0    |
/// | breathiness   | ratio             | 0 .. 1      |
/// | jitter        | ratio             | 0 .. 1      |
///
/// The bounds are engineering choices for the reference renderer, not
/// measured speech statistics.
FeatureRegistry build_default_registry();

/// Empty iff ids are non-empty and unique, min < max (finite) for every
/// feature and there is at least one feature.
ValidationReport validate_registry(const FeatureRegistry& reg);

}  // namespace vocalpersona
