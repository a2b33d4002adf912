#include "vocalpersona/sampler.hpp"

#include <algorithm>

#include "vocalpersona/truncated_normal.hpp"

namespace vocalpersona {

RngStream RngStream::split(std::uint64_t child) const noexcept
{
    RngStream out = *this;
    out.stream_ = mix64(stream_ ^ mix64(child + 1));
    return out;
}

FeatureDraw draw_feature(const FeaturePDF& pdf, const RngStream& stream, std::uint64_t index)
{
    const auto [u_component, u_value] = stream.uniforms(index);

    std::size_t chosen = 0;
    bool found = false;
    double cumulative = 0.0;
    for (std::size_t k = 0; k < pdf.components.size(); ++k) {
        const double w = pdf.components[k].weight;
        if (!(w > 0)) {
            continue;
        }
        cumulative += w;
        chosen = k;
        found = true;
        if (u_component < cumulative) {
            break;
        }
    }
    if (!found) {
        chosen = 0;
    }
    const auto& c = pdf.components[chosen];
    return {truncnorm::quantile(u_value, c.mean, c.sd, pdf.lo, pdf.hi), chosen};
}

FeatureSample sample_features(const Persona& p, std::uint64_t seed, std::uint64_t index)
{
    if (auto report = validate_persona_shape(p); !report.empty()) {
        throw ValidationError(std::move(report));
    }
    FeatureSample out;
    out.seed = seed;
    out.persona_id = p.id;
    out.values.reserve(p.pdfs.size());
    for (std::size_t n = 0; n < p.pdfs.size(); ++n) {
        out.values.push_back(draw_feature(p.pdfs[n], RngStream(seed, n), index).value);
    }
    return out;
}

Trajectory sample_trajectory(const Persona& p, std::size_t n_segments, double lambda, std::uint64_t seed)
{
    if (n_segments == 0) {
        throw DomainError("trajectory needs at least one segment");
    }
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw DomainError("smoothing must lie in [0, 1]");
    }
    Trajectory out;
    out.smoothing = lambda;
    out.segments.reserve(n_segments);
    for (std::size_t i = 0; i < n_segments; ++i) {
        FeatureSample s = sample_features(p, seed, i);
        if (i > 0) {
            const auto& prev = out.segments.back().values;
            for (std::size_t n = 0; n < s.values.size(); ++n) {
                const double t = lambda * prev[n] + (1 - lambda) * s.values[n];
                s.values[n] = std::clamp(t, p.pdfs[n].lo, p.pdfs[n].hi);
            }
        }
        out.segments.push_back(std::move(s));
    }
    return out;
}

}  // namespace vocalpersona
