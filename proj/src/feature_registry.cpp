#include "vocalpersona/feature_registry.hpp"

#include <cmath>
#include <set>

namespace vocalpersona {

std::optional<std::size_t> FeatureRegistry::index_of(std::string_view id) const
{
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i].id == id) {
            return i;
        }
    }
    return std::nullopt;
}

const FeatureSpec& FeatureRegistry::at(std::string_view id) const
{
    if (auto idx = index_of(id)) {
        return features[*idx];
    }
    throw UnknownFeatureError(std::string(id));
}

FeatureRegistry build_default_registry()
{
    FeatureRegistry reg;
    reg.version = 1;
    reg.features = {
        {"f0_mean", "pitch level", "Hz", 50.0, 400.0,
         "Mean fundamental frequency of voiced speech."},
        {"f0_range", "pitch range", "semitones", 0.0, 24.0,
         "Span of the pitch contour across an utterance."},
        {"speech_rate", "speech rate", "syllables/second", 1.0, 10.0,
         "Syllables produced per second of voiced speech."},
        {"pause_scale", "pause length", "ratio", 0.25, 4.0,
         "Multiplier on the nominal 150 ms inter-word pause."},
        {"loudness", "loudness", "dB", -20.0, 20.0,
         "Gain relative to the renderer's reference level."},
        {"spectral_tilt", "spectral tilt", "dB/octave", -24.0, 0.0,
         "Slope of the source spectrum; more negative is darker."},
        {"breathiness", "breathiness", "ratio", 0.0, 1.0,
         "Fraction of aspiration noise mixed into the glottal source."},
        {"jitter", "jitter", "ratio", 0.0, 1.0,
         "Cycle-to-cycle F0 perturbation depth (1 = 5% period deviation)."},
    };
    return reg;
}

ValidationReport validate_registry(const FeatureRegistry& reg)
{
    ValidationReport report;
    const std::string subject = "registry";
    if (reg.features.empty()) {
        report.push_back({subject, "", "empty-registry", "registry must define at least one feature"});
    }
    std::set<std::string> seen;
    for (const auto& f : reg.features) {
        if (f.id.empty()) {
            report.push_back({subject, "", "empty-id", "feature id must be non-empty"});
        }
        else if (!seen.insert(f.id).second) {
            report.push_back({subject, f.id, "duplicate-id", "feature id appears more than once"});
        }
        if (!std::isfinite(f.min) || !std::isfinite(f.max)) {
            report.push_back({subject, f.id, "non-finite", "feature bounds must be finite"});
        }
        else if (!(f.min < f.max)) {
            report.push_back({subject, f.id, "bounds", "feature min must be strictly below max"});
        }
    }
    return report;
}

}  // namespace vocalpersona
