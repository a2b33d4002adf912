#include "vocalpersona/render_backend.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>

#include "vocalpersona/counter_rng.hpp"

namespace vocalpersona {

namespace {

bool is_vowel(char c)
{
    switch (std::tolower(static_cast<unsigned char>(c))) {
    case 'a':
    case 'e':
    case 'i':
    case 'o':
    case 'u':
    case 'y':
        return true;
    default:
        return false;
    }
}

// First vowel letter of every vowel group; 'e' (schwa-like) when none.
std::vector<char> syllable_vowels(std::string_view word)
{
    std::vector<char> out;
    bool in_group = false;
    for (char c : word) {
        if (is_vowel(c)) {
            if (!in_group) {
                out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            }
            in_group = true;
        }
        else {
            in_group = false;
        }
    }
    if (out.empty()) {
        out.push_back('e');
    }
    return out;
}

struct Formants {
    std::array<double, 3> freq;
};

Formants formants_for(char vowel)
{
    switch (vowel) {
    case 'a':
        return {{730, 1090, 2440}};
    case 'i':
        return {{270, 2290, 3010}};
    case 'o':
        return {{570, 840, 2410}};
    case 'u':
        return {{300, 870, 2240}};
    case 'y':
        return {{500, 1500, 2500}};
    default:
        return {{530, 1840, 2480}};
    }
}

constexpr std::array<double, 3> formant_bandwidths = {80.0, 90.0, 120.0};

// Klatt-style two-pole resonator with unity gain at DC.
class Resonator {
  public:
    void set(double freq, double bw, double sample_rate)
    {
        const double t = 1.0 / sample_rate;
        c_ = -std::exp(-2 * std::numbers::pi * bw * t);
        b_ = 2 * std::exp(-std::numbers::pi * bw * t) * std::cos(2 * std::numbers::pi * freq * t);
        a_ = 1 - b_ - c_;
    }

    double operator()(double x)
    {
        const double y = a_ * x + b_ * y1_ + c_ * y2_;
        y2_ = y1_;
        y1_ = y;
        return y;
    }

  private:
    double a_ = 1, b_ = 0, c_ = 0;
    double y1_ = 0, y2_ = 0;
};

// Rosenberg glottal-flow derivative, normalized to peak magnitude 1.
double glottal_derivative(double phase)
{
    constexpr double open = 0.40;
    constexpr double close = 0.16;
    constexpr double peak = std::numbers::pi / (2 * close);
    if (phase < open) {
        return 0.5 * std::numbers::pi / open * std::sin(std::numbers::pi * phase / open) / peak;
    }
    if (phase < open + close) {
        return -std::sin(std::numbers::pi * (phase - open) / (2 * close));
    }
    return 0.0;
}

// Raised-cosine ramp from `from` to `to` as t goes 0 -> 1.
double ramp(double from, double to, double t)
{
    return from + (to - from) * 0.5 * (1 - std::cos(std::numbers::pi * std::clamp(t, 0.0, 1.0)));
}

struct Segment {
    std::size_t begin;
    std::size_t end;
    bool voiced;
    char vowel;
    double start_level;
    double end_level;
};

constexpr std::uint64_t noise_stream = 0x4e4f495345ull;   // "NOISE"
constexpr std::uint64_t jitter_stream = 0x4a4954544552ull;  // "JITTER"

}  // namespace

std::vector<std::string> split_words(std::string_view text)
{
    std::vector<std::string> words;
    std::string current;
    auto flush = [&] {
        const bool has_alnum = std::any_of(current.begin(), current.end(),
                                           [](unsigned char c) { return std::isalnum(c) != 0; });
        if (has_alnum) {
            words.push_back(current);
        }
        current.clear();
    };
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
        }
        else {
            current.push_back(c);
        }
    }
    flush();
    return words;
}

std::size_t estimate_syllables(std::string_view text)
{
    std::size_t total = 0;
    for (const auto& w : split_words(text)) {
        total += syllable_vowels(w).size();
    }
    return std::max<std::size_t>(total, 1);
}

RenderResult render_voice(std::string_view text, const VoiceParameters& voice, int sample_rate,
                          std::uint64_t seed)
{
    if (sample_rate < min_sample_rate || sample_rate > max_sample_rate) {
        throw ConfigurationError("unsupported sample rate " + std::to_string(sample_rate) + " (supported: "
                                 + std::to_string(min_sample_rate) + " to "
                                 + std::to_string(max_sample_rate) + ")");
    }
    if (text.empty()) {
        throw DomainError("render text must be non-empty");
    }
    if (!(voice.speech_rate > 0) || !(voice.f0_mean > 0) || !(voice.pause_scale >= 0)) {
        throw DomainError("speech_rate and f0_mean must be positive, pause_scale non-negative");
    }
    const double sr = sample_rate;

    auto words = split_words(text);
    if (words.empty()) {
        words.emplace_back("e");
    }

    // Timeline on an absolute clock so rounding never accumulates.
    const double syllable_seconds = 1.0 / voice.speech_rate;
    const double pause_seconds = base_pause_seconds * voice.pause_scale;
    std::vector<Segment> segments;
    double clock = 0.0;
    std::size_t syllables = 0;
    auto at = [&](double seconds) { return static_cast<std::size_t>(std::llround(seconds * sr)); };
    for (std::size_t w = 0; w < words.size(); ++w) {
        const auto vowels = syllable_vowels(words[w]);
        for (std::size_t k = 0; k < vowels.size(); ++k) {
            const std::size_t begin = at(clock);
            clock += syllable_seconds;
            segments.push_back({begin, at(clock), true, vowels[k], k == 0 ? 0.0 : 0.25,
                                k + 1 == vowels.size() ? 0.0 : 0.25});
            ++syllables;
        }
        if (w + 1 < words.size()) {
            const std::size_t begin = at(clock);
            clock += pause_seconds;
            segments.push_back({begin, at(clock), false, 'e', 0.0, 0.0});
        }
    }
    const std::size_t total = at(clock);
    const double voiced_seconds = static_cast<double>(syllables) * syllable_seconds;

    RenderResult result;
    result.syllables = syllables;
    result.words = words.size();
    result.voiced_seconds = voiced_seconds;
    result.pause_seconds = static_cast<double>(words.size() - 1) * pause_seconds;
    result.audio.sample_rate = sample_rate;
    result.audio.pcm.assign(total, 0.0f);

    const RngStream noise(seed, noise_stream);
    const RngStream jitter_rng(seed, jitter_stream);

    const double cutoff = std::min(8000.0 * std::exp2(voice.spectral_tilt / 3.0), 0.45 * sr);
    const double tilt_coeff = 1.0 - std::exp(-2 * std::numbers::pi * cutoff / sr);
    const double gain = std::pow(10.0, voice.loudness / 20.0);
    const double breath = std::clamp(voice.breathiness, 0.0, 1.0);

    std::array<Resonator, 3> resonators;
    std::array<double, 3> formant_state = formants_for('e').freq;
    const double formant_glide = 1.0 - std::exp(-1.0 / (0.015 * sr));  // 15 ms glide

    std::vector<double> out(total, 0.0);
    double phase = 0.0;
    double period_scale = 1.0;
    std::uint64_t cycle = 0;
    double tilt_state = 0.0;
    double voiced_elapsed = 0.0;
    double sum_sq = 0.0;

    for (const auto& seg : segments) {
        const Formants target = formants_for(seg.vowel);
        const double length = static_cast<double>(seg.end - seg.begin);
        for (std::size_t n = seg.begin; n < seg.end && n < total; ++n) {
            double source = 0.0;
            double envelope = 0.0;
            if (seg.voiced) {
                const double t = (static_cast<double>(n - seg.begin) + 0.5) / length;
                if (t < 0.25) {
                    envelope = ramp(seg.start_level, 1.0, t / 0.25);
                }
                else if (t > 0.75) {
                    envelope = ramp(1.0, seg.end_level, (t - 0.75) / 0.25);
                }
                else {
                    envelope = 1.0;
                }

                const double progress = voiced_seconds > 0 ? voiced_elapsed / voiced_seconds : 0.0;
                const double semitones = voice.f0_range * (0.5 - progress);
                const double f0 = voice.f0_mean * std::exp2(semitones / 12.0);
                phase += f0 / (sr * period_scale);
                if (phase >= 1.0) {
                    phase -= std::floor(phase);
                    ++cycle;
                    const double r = 2.0 * jitter_rng.uniforms(cycle)[0] - 1.0;
                    period_scale = 1.0 + 0.05 * voice.jitter * r;
                }
                const double voiced = glottal_derivative(phase);
                const double aspiration = 2.0 * noise.uniforms(n)[0] - 1.0;
                source = (1.0 - breath) * voiced + breath * 0.6 * aspiration;
                voiced_elapsed += 1.0 / sr;
            }

            tilt_state += tilt_coeff * (source - tilt_state);
            double y = tilt_state;
            for (std::size_t f = 0; f < 3; ++f) {
                formant_state[f] += formant_glide * (target.freq[f] - formant_state[f]);
                resonators[f].set(std::min(formant_state[f], 0.45 * sr), formant_bandwidths[f], sr);
                y = resonators[f](y);
            }
            const double s = gain * envelope * y;
            out[n] = s;
            sum_sq += s * s;
        }
    }

    result.pre_normalization_rms = total > 0 ? std::sqrt(sum_sq / static_cast<double>(total)) : 0.0;

    double peak = 0.0;
    for (double& s : out) {
        if (!std::isfinite(s)) {
            s = 0.0;
        }
        peak = std::max(peak, std::abs(s));
    }
    const double scale = peak > 0.99 ? 0.99 / peak : 1.0;
    for (std::size_t n = 0; n < total; ++n) {
        result.audio.pcm[n] = static_cast<float>(std::clamp(out[n] * scale, -1.0, 1.0));
    }
    return result;
}

namespace {

constexpr std::array<std::string_view, 8> renderer_features = {
    "f0_mean", "f0_range", "speech_rate", "pause_scale", "loudness", "spectral_tilt", "breathiness", "jitter"};

}  // namespace

SourceFilterBackend::SourceFilterBackend(FeatureRegistry reg) : registry_(std::move(reg))
{
    for (std::size_t i = 0; i < renderer_features.size(); ++i) {
        auto idx = registry_.index_of(renderer_features[i]);
        if (!idx) {
            throw ConfigurationError("source-filter renderer needs feature '"
                                     + std::string(renderer_features[i]) + "'");
        }
        index_[i] = *idx;
    }
}

VoiceParameters SourceFilterBackend::voice_parameters(const FeatureSample& sample) const
{
    ValidationReport report;
    const std::string subject = "sample " + sample.persona_id;
    if (sample.values.size() != registry_.size()) {
        report.push_back({subject, "", "coverage", "sample has " + std::to_string(sample.values.size())
                                                       + " values, registry has "
                                                       + std::to_string(registry_.size())});
        throw ValidationError(std::move(report));
    }
    for (std::size_t n = 0; n < registry_.size(); ++n) {
        const auto& f = registry_.features[n];
        const double v = sample.values[n];
        if (!std::isfinite(v) || v < f.min || v > f.max) {
            report.push_back({subject, f.id, "sample-bounds", "value outside the feature's bounds"});
        }
    }
    if (!report.empty()) {
        throw ValidationError(std::move(report));
    }
    const auto& v = sample.values;
    return {v[index_[0]], v[index_[1]], v[index_[2]], v[index_[3]],
            v[index_[4]], v[index_[5]], v[index_[6]], v[index_[7]]};
}

RenderResult SourceFilterBackend::render_detailed(const RenderRequest& req) const
{
    return render_voice(req.text, voice_parameters(req.sample), req.sample_rate, req.seed);
}

AudioBuffer SourceFilterBackend::render(const RenderRequest& req) const
{
    return render_detailed(req).audio;
}

AudioBuffer render_utterance(const RenderRequest& req)
{
    static const SourceFilterBackend backend;
    return backend.render(req);
}

}  // namespace vocalpersona
