#include "vocalpersona/macro_engine.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace vocalpersona {

std::string_view to_string(TransformKind kind)
{
    return kind == TransformKind::linear ? "linear" : "exponential";
}

TransformKind transform_kind_from_string(std::string_view s)
{
    if (s == "linear") {
        return TransformKind::linear;
    }
    if (s == "exponential") {
        return TransformKind::exponential;
    }
    throw DomainError("unknown transform kind '" + std::string(s) + "'");
}

std::string_view to_string(MacroTarget t)
{
    return t == MacroTarget::mean ? "mean" : "sd";
}

MacroTarget macro_target_from_string(std::string_view s)
{
    if (s == "mean") {
        return MacroTarget::mean;
    }
    if (s == "sd") {
        return MacroTarget::sd;
    }
    throw DomainError("unknown macro target '" + std::string(s) + "'");
}

double TransformSpec::base(double x) const
{
    const double t = x / macro_max_value;
    return kind == TransformKind::linear ? 1.0 + sensitivity * t : std::exp(sensitivity * t);
}

bool MacroChannel::targets_mean() const
{
    return std::find(targets.begin(), targets.end(), MacroTarget::mean) != targets.end();
}

bool MacroChannel::targets_sd() const
{
    return std::find(targets.begin(), targets.end(), MacroTarget::sd) != targets.end();
}

const MacroChannel* Macro::channel_for(std::string_view feature_id) const
{
    for (const auto& ch : channels) {
        if (ch.feature_id == feature_id) {
            return &ch;
        }
    }
    return nullptr;
}

ValidationReport validate_macro(const FeatureRegistry& reg, const Macro& m)
{
    ValidationReport out;
    const std::string subject = "macro " + (m.id.empty() ? std::string("<unnamed>") : m.id);
    if (m.id.empty()) {
        out.push_back({subject, "", "empty-id", "macro id must be non-empty"});
    }
    std::set<std::string> seen;
    for (const auto& ch : m.channels) {
        if (!reg.index_of(ch.feature_id)) {
            out.push_back({subject, ch.feature_id, "macro-unknown-feature",
                           "channel refers to a feature not in the registry"});
        }
        if (!seen.insert(ch.feature_id).second) {
            out.push_back({subject, ch.feature_id, "macro-duplicate-channel",
                           "macro has more than one channel for this feature"});
        }
        if (ch.targets.empty()) {
            out.push_back({subject, ch.feature_id, "empty-targets",
                           "channel must target mean and/or sd"});
        }
        if (!std::isfinite(ch.involvement) || !std::isfinite(ch.transform.sensitivity)) {
            out.push_back({subject, ch.feature_id, "non-finite", "channel parameters must be finite"});
        }
        else if (ch.transform.kind == TransformKind::linear && !(ch.transform.sensitivity > -1.0)) {
            out.push_back({subject, ch.feature_id, "linear-sensitivity",
                           "linear transform needs sensitivity > -1 to stay positive on [0, 100]"});
        }
    }
    return out;
}

ValidationReport validate_macro_library(const FeatureRegistry& reg, std::span<const Macro> library)
{
    ValidationReport out;
    std::set<std::string> ids;
    for (const auto& m : library) {
        if (!m.id.empty() && !ids.insert(m.id).second) {
            out.push_back({"macro " + m.id, "", "duplicate-macro-id", "macro id appears more than once"});
        }
        auto r = validate_macro(reg, m);
        out.insert(out.end(), r.begin(), r.end());
    }
    return out;
}

ValidationReport validate_macro_set(const MacroSet& set)
{
    ValidationReport out;
    std::set<std::string> ids;
    for (const auto& s : set) {
        if (!ids.insert(s.macro_id).second) {
            out.push_back({"macro set", "", "duplicate-setting",
                           "macro '" + s.macro_id + "' is set more than once"});
        }
        if (!(s.value >= macro_min_value && s.value <= macro_max_value)) {
            out.push_back({"macro set", "", "value-range",
                           "macro '" + s.macro_id + "' value must lie in [0, 100]"});
        }
    }
    return out;
}

double macro_factor(const MacroChannel& ch, double x)
{
    if (!(x >= macro_min_value && x <= macro_max_value)) {
        throw DomainError("macro value must lie in [0, 100]");
    }
    if (x == 0.0 || ch.involvement == 0.0) {
        return 1.0;
    }
    return std::pow(ch.transform.base(x), ch.involvement);
}

const Macro& find_macro(std::span<const Macro> library, std::string_view id)
{
    for (const auto& m : library) {
        if (m.id == id) {
            return m;
        }
    }
    throw UnknownMacroError(std::string(id));
}

namespace {

// Per-target products: a channel contributes to the mean (sd) product only
// when it targets the mean (sd).
struct FeatureFactors {
    double mean = 1.0;
    double sd = 1.0;
};

std::vector<FeatureFactors> target_factors(const FeatureRegistry& reg,
                                           std::span<const Macro> library, const MacroSet& set)
{
    std::set<std::string> seen;
    for (const auto& s : set) {
        if (!seen.insert(s.macro_id).second) {
            throw DomainError("macro '" + s.macro_id + "' is set more than once");
        }
    }
    std::vector<FeatureFactors> out(reg.size());
    for (const auto& s : set) {
        const Macro& m = find_macro(library, s.macro_id);
        if (!(s.value >= macro_min_value && s.value <= macro_max_value)) {
            throw DomainError("macro '" + s.macro_id + "' value must lie in [0, 100]");
        }
        for (std::size_t n = 0; n < reg.size(); ++n) {
            const MacroChannel* ch = m.channel_for(reg.features[n].id);
            if (!ch) {
                continue;
            }
            const double f = macro_factor(*ch, s.value);
            if (ch->targets_mean()) {
                out[n].mean *= f;
            }
            if (ch->targets_sd()) {
                out[n].sd *= f;
            }
        }
    }
    return out;
}

}  // namespace

Persona apply_macros(const Persona& p, std::span<const Macro> library, const MacroSet& set,
                     const FeatureRegistry& reg)
{
    if (p.pdfs.size() != reg.size()) {
        throw IncomparableError("persona '" + p.id + "' does not match the registry");
    }
    for (std::size_t n = 0; n < reg.size(); ++n) {
        if (p.pdfs[n].feature_id != reg.features[n].id) {
            throw IncomparableError("persona '" + p.id + "' does not match the registry");
        }
    }
    const auto factors = target_factors(reg, library, set);

    Persona out = p;
    for (std::size_t n = 0; n < reg.size(); ++n) {
        auto& pdf = out.pdfs[n];
        const double width = pdf.hi - pdf.lo;
        const double sd_min = 1e-6 * width;
        const double sd_max = width;
        for (auto& c : pdf.components) {
            if (factors[n].mean != 1.0) {
                c.mean = std::clamp(c.mean * factors[n].mean, pdf.lo, pdf.hi);
            }
            if (factors[n].sd != 1.0) {
                c.sd = std::clamp(c.sd * factors[n].sd, sd_min, sd_max);
            }
        }
    }
    return out;
}

std::vector<Macro> build_default_macro_library(const FeatureRegistry& reg)
{
    auto exp_channel = [](std::string feature, double factor_at_100, std::vector<MacroTarget> targets) {
        return MacroChannel{std::move(feature), 1.0,
                            TransformSpec{TransformKind::exponential, std::log(factor_at_100)},
                            std::move(targets)};
    };
    using enum MacroTarget;

    // Factors are the full-scale (x = 100) multipliers.
    std::vector<Macro> lib = {
        {"stern",
         "stern",
         {exp_channel("f0_mean", 0.85, {mean}),
          exp_channel("f0_range", 0.5, {mean, sd}),
          exp_channel("speech_rate", 0.8, {mean}),
          exp_channel("spectral_tilt", 1.4, {mean})}},
        {"bright",
         "bright",
         {exp_channel("f0_mean", 1.12, {mean}),
          exp_channel("f0_range", 1.3, {mean}),
          exp_channel("spectral_tilt", 0.6, {mean})}},
        {"soft",
         "soft",
         {exp_channel("breathiness", 2.5, {mean}),
          exp_channel("spectral_tilt", 1.3, {mean}),
          MacroChannel{"speech_rate", 1.0, TransformSpec{TransformKind::linear, -0.1}, {mean}}}},
        {"lively",
         "lively",
         {exp_channel("f0_range", 1.6, {mean, sd}),
          exp_channel("speech_rate", 1.2, {mean, sd}),
          exp_channel("pause_scale", 0.7, {mean})}},
    };
    for (auto& m : lib) {
        std::erase_if(m.channels, [&](const MacroChannel& ch) { return !reg.index_of(ch.feature_id); });
    }
    return lib;
}

}  // namespace vocalpersona
