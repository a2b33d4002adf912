#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vocalpersona/feature_registry.hpp"
#include "vocalpersona/sampler.hpp"

namespace vocalpersona {

inline constexpr int default_sample_rate = 44100;
inline constexpr int min_sample_rate = 8000;
inline constexpr int max_sample_rate = 192000;

/// Nominal inter-word pause before pause_scale is applied, in seconds.
inline constexpr double base_pause_seconds = 0.15;

struct RenderRequest {
    std::string text;
    FeatureSample sample;
    int sample_rate = default_sample_rate;
    std::uint64_t seed = 0;
};

/// Mono PCM in [-1, 1].
struct AudioBuffer {
    std::vector<float> pcm;
    int sample_rate = default_sample_rate;

    double duration_seconds() const
    {
        return static_cast<double>(pcm.size()) / static_cast<double>(sample_rate);
    }

    bool operator==(const AudioBuffer&) const = default;
};

/// Any synthesis engine driven by a FeatureSample. Implementations must be
/// deterministic functions of the request.
class RenderBackend {
  public:
    virtual ~RenderBackend() = default;
    virtual std::string_view name() const = 0;
    virtual AudioBuffer render(const RenderRequest& req) const = 0;
};

/// Vowel-letter groups per whitespace-separated word, at least one per word
/// that contains a letter or digit; "y" counts as a vowel. Never returns 0.
std::size_t estimate_syllables(std::string_view text);

/// Words as the renderer sees them (tokens with at least one letter/digit).
std::vector<std::string> split_words(std::string_view text);

/// The eight renderer inputs, in physical units.
struct VoiceParameters {
    double f0_mean = 120.0;
    double f0_range = 0.0;
    double speech_rate = 4.0;
    double pause_scale = 1.0;
    double loudness = 0.0;
    double spectral_tilt = -6.0;
    double breathiness = 0.0;
    double jitter = 0.0;
};

struct RenderResult {
    AudioBuffer audio;
    double pre_normalization_rms = 0.0;  // RMS after gain, before peak normalization
    double voiced_seconds = 0.0;
    double pause_seconds = 0.0;
    std::size_t syllables = 0;
    std::size_t words = 0;
};

/// Reference source-filter engine.
///
/// - Timing: each syllable lasts 1 / speech_rate seconds; consecutive words
///   are separated by base_pause_seconds * pause_scale of silence.
/// - Source: Rosenberg glottal-flow derivative at f0, with a linear pitch
///   declination from +f0_range/2 to -f0_range/2 semitones over the voiced
///   time. Jitter perturbs each glottal period by up to 5% * jitter.
///   Aspiration noise is mixed in at the breathiness ratio.
/// - Filter: one-pole low-pass whose cutoff falls one octave per 3 dB/octave
///   of tilt (8 kHz at 0 dB/oct), then three cascaded formant resonators
///   chosen from the syllable's vowel letter.
/// - Gain 10^(loudness / 20), then peak normalization to at most 0.99.
class SourceFilterBackend final : public RenderBackend {
  public:
    /// Throws ConfigurationError when `reg` lacks one of the eight features.
    explicit SourceFilterBackend(FeatureRegistry reg = build_default_registry());

    std::string_view name() const override { return "source-filter"; }
    AudioBuffer render(const RenderRequest& req) const override;

    /// render() plus timing and level diagnostics.
    RenderResult render_detailed(const RenderRequest& req) const;

    /// Maps a sample onto renderer inputs. Throws ValidationError when the
    /// sample does not match the registry or a value is out of bounds.
    VoiceParameters voice_parameters(const FeatureSample& sample) const;

    const FeatureRegistry& registry() const noexcept { return registry_; }

  private:
    FeatureRegistry registry_;
    std::size_t index_[8];
};

/// Lower-level entry point used by the backend; exposed for tests that pin
/// parameters directly. Throws ConfigurationError for an unsupported rate,
/// DomainError for empty text.
RenderResult render_voice(std::string_view text, const VoiceParameters& voice, int sample_rate,
                          std::uint64_t seed);

/// Renders with the default registry.
AudioBuffer render_utterance(const RenderRequest& req);

}  // namespace vocalpersona
