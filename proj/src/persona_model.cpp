#include "vocalpersona/persona_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "vocalpersona/truncated_normal.hpp"

namespace vocalpersona {

double FeaturePDF::density(double z) const
{
    double total = 0.0;
    for (const auto& c : components) {
        if (c.weight > 0) {
            total += c.weight * truncnorm::pdf(z, c.mean, c.sd, lo, hi);
        }
    }
    return total;
}

double FeaturePDF::cdf(double z) const
{
    double total = 0.0;
    for (const auto& c : components) {
        if (c.weight > 0) {
            total += c.weight * truncnorm::cdf(z, c.mean, c.sd, lo, hi);
        }
    }
    return total;
}

const FeaturePDF& Persona::pdf(std::string_view feature_id) const
{
    for (const auto& p : pdfs) {
        if (p.feature_id == feature_id) {
            return p;
        }
    }
    throw UnknownFeatureError(std::string(feature_id));
}

const Persona& PersonaSpace::at(std::string_view persona_id) const
{
    for (const auto& p : personas) {
        if (p.id == persona_id) {
            return p;
        }
    }
    throw UnknownPersonaError(std::string(persona_id));
}

bool is_valid_context_tag(std::string_view tag)
{
    static constexpr std::array<std::string_view, 5> fixed = {
        "physical", "technological", "sociocultural", "performative", "baseline"};
    if (std::find(fixed.begin(), fixed.end(), tag) != fixed.end()) {
        return true;
    }
    constexpr std::string_view custom = "custom:";
    return tag.size() > custom.size() && tag.substr(0, custom.size()) == custom;
}

namespace {

void check_pdf(const std::string& subject, const FeaturePDF& pdf, ValidationReport& out)
{
    const auto& fid = pdf.feature_id;
    if (!std::isfinite(pdf.lo) || !std::isfinite(pdf.hi)) {
        out.push_back({subject, fid, "non-finite", "truncation bounds must be finite"});
        return;
    }
    if (!(pdf.lo < pdf.hi)) {
        out.push_back({subject, fid, "truncation-bounds", "lo must be strictly below hi"});
    }
    if (pdf.components.empty()) {
        out.push_back({subject, fid, "empty-components", "at least one mixture component is required"});
        return;
    }
    double weight_sum = 0.0;
    bool finite = true;
    for (const auto& c : pdf.components) {
        if (!std::isfinite(c.weight) || !std::isfinite(c.mean) || !std::isfinite(c.sd)) {
            finite = false;
            continue;
        }
        weight_sum += c.weight;
        if (!(c.sd > 0)) {
            out.push_back({subject, fid, "sd-positive", "component sd must be > 0"});
        }
        if (c.weight < 0) {
            out.push_back({subject, fid, "weight-nonnegative", "component weight must be >= 0"});
        }
        if (c.mean < pdf.lo || c.mean > pdf.hi) {
            out.push_back({subject, fid, "mean-within-truncation",
                           "component mean must lie within [lo, hi]"});
        }
    }
    if (!finite) {
        out.push_back({subject, fid, "non-finite", "component parameters must be finite"});
        return;
    }
    if (std::abs(weight_sum - 1.0) > 1e-9) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", weight_sum);
        out.push_back({subject, fid, "normalization",
                       std::string("component weights sum to ") + buf + ", expected 1"});
    }
}

}  // namespace

ValidationReport validate_persona_shape(const Persona& p)
{
    ValidationReport out;
    const std::string subject = p.id.empty() ? std::string("<persona>") : p.id;
    if (p.id.empty()) {
        out.push_back({subject, "", "empty-id", "persona id must be non-empty"});
    }
    for (const auto& tag : p.context_tags) {
        if (!is_valid_context_tag(tag)) {
            out.push_back({subject, "", "context-tag", "unrecognized context tag '" + tag + "'"});
        }
    }
    if (p.pdfs.empty()) {
        out.push_back({subject, "", "coverage", "persona defines no feature PDFs"});
    }
    for (const auto& pdf : p.pdfs) {
        check_pdf(subject, pdf, out);
    }
    return out;
}

ValidationReport validate_persona(const FeatureRegistry& reg, const Persona& p)
{
    ValidationReport out = validate_persona_shape(p);
    const std::string subject = p.id.empty() ? std::string("<persona>") : p.id;

    std::set<std::string> present;
    for (const auto& pdf : p.pdfs) {
        if (!reg.index_of(pdf.feature_id)) {
            out.push_back({subject, pdf.feature_id, "coverage", "PDF for a feature not in the registry"});
        }
        else if (!present.insert(pdf.feature_id).second) {
            out.push_back({subject, pdf.feature_id, "coverage", "feature has more than one PDF"});
        }
    }
    bool all_present = true;
    for (const auto& f : reg.features) {
        if (!present.count(f.id)) {
            all_present = false;
            out.push_back({subject, f.id, "coverage", "no PDF for registry feature"});
        }
    }
    if (all_present && p.pdfs.size() == reg.size()) {
        for (std::size_t i = 0; i < reg.size(); ++i) {
            if (p.pdfs[i].feature_id != reg.features[i].id) {
                out.push_back({subject, p.pdfs[i].feature_id, "order",
                               "PDFs must follow registry order"});
                break;
            }
        }
    }

    for (const auto& pdf : p.pdfs) {
        auto idx = reg.index_of(pdf.feature_id);
        if (!idx) {
            continue;
        }
        const auto& spec = reg.features[*idx];
        if (pdf.lo < spec.min || pdf.hi > spec.max) {
            out.push_back({subject, pdf.feature_id, "truncation-within-feature",
                           "[lo, hi] must lie within the feature's physical bounds"});
        }
    }
    return out;
}

ValidationReport validate_space(const PersonaSpace& space)
{
    ValidationReport out = validate_registry(space.registry);
    if (space.personas.empty()) {
        out.push_back({"space", "", "empty-space", "persona space must contain a persona"});
    }
    std::set<std::string> ids;
    for (const auto& p : space.personas) {
        if (!ids.insert(p.id).second) {
            out.push_back({p.id, "", "duplicate-persona-id", "persona id appears more than once"});
        }
        auto r = validate_persona(space.registry, p);
        out.insert(out.end(), r.begin(), r.end());
    }
    return out;
}

bool same_feature_layout(const Persona& a, const Persona& b)
{
    if (a.pdfs.size() != b.pdfs.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.pdfs.size(); ++i) {
        if (a.pdfs[i].feature_id != b.pdfs[i].feature_id) {
            return false;
        }
    }
    return true;
}

double bhattacharyya(const FeaturePDF& a, const FeaturePDF& b)
{
    const double lo = std::min(a.lo, b.lo);
    const double hi = std::max(a.hi, b.hi);
    const std::size_t n = overlap_grid_points;
    const double step = (hi - lo) / static_cast<double>(n - 1);

    auto grid = [&](std::size_t i) { return i + 1 == n ? hi : lo + step * static_cast<double>(i); };

    double cross = 0.0;
    double mass_a = 0.0;
    double mass_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = grid(i);
        const double fa = a.density(z);
        const double fb = b.density(z);
        const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        cross += w * std::sqrt(fa * fb);
        mass_a += w * fa;
        mass_b += w * fb;
    }
    mass_a *= step;
    mass_b *= step;
    cross *= step;

    auto resolved = [](double m) { return m > 0.5 && m < 2.0; };
    if (resolved(mass_a) && resolved(mass_b)) {
        return std::min(1.0, cross / std::sqrt(mass_a * mass_b));
    }

    // Narrow peaks: per-cell probabilities never miss mass.
    double bc = 0.0;
    double prev_a = 0.0;
    double prev_b = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double z = grid(i);
        const double ca = a.cdf(z);
        const double cb = b.cdf(z);
        bc += std::sqrt(std::max(0.0, ca - prev_a) * std::max(0.0, cb - prev_b));
        prev_a = ca;
        prev_b = cb;
    }
    return std::clamp(bc, 0.0, 1.0);
}

double persona_overlap(const Persona& a, const Persona& b)
{
    if (!same_feature_layout(a, b)) {
        throw IncomparableError("personas '" + a.id + "' and '" + b.id
                                + "' are defined over different feature registries");
    }
    const Persona& first = (b.id < a.id) ? b : a;
    const Persona& second = (b.id < a.id) ? a : b;

    double log_sum = 0.0;
    for (std::size_t i = 0; i < first.pdfs.size(); ++i) {
        const double bc = bhattacharyya(first.pdfs[i], second.pdfs[i]);
        if (!(bc > 0)) {
            return 0.0;
        }
        log_sum += std::log(bc);
    }
    return std::exp(log_sum / static_cast<double>(first.pdfs.size()));
}

std::string blend_id(std::string_view a, std::string_view b, double alpha)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", alpha);
    return "blend(" + std::string(a) + "," + std::string(b) + "," + buf + ")";
}

namespace {

std::vector<MixtureComponent> sorted_by_mean(std::vector<MixtureComponent> comps)
{
    std::stable_sort(comps.begin(), comps.end(),
                     [](const auto& x, const auto& y) { return x.mean < y.mean; });
    return comps;
}

FeaturePDF blend_pdf(const FeaturePDF& a, const FeaturePDF& b, double alpha)
{
    auto ca = sorted_by_mean(a.components);
    auto cb = sorted_by_mean(b.components);
    while (ca.size() < cb.size()) {
        auto pad = cb[ca.size()];
        pad.weight = 0.0;
        ca.push_back(pad);
    }
    while (cb.size() < ca.size()) {
        auto pad = ca[cb.size()];
        pad.weight = 0.0;
        cb.push_back(pad);
    }

    FeaturePDF out;
    out.feature_id = a.feature_id;
    out.lo = (1 - alpha) * a.lo + alpha * b.lo;
    out.hi = (1 - alpha) * a.hi + alpha * b.hi;
    out.components.resize(ca.size());

    double weight_sum = 0.0;
    for (std::size_t k = 0; k < ca.size(); ++k) {
        auto& c = out.components[k];
        c.weight = (1 - alpha) * ca[k].weight + alpha * cb[k].weight;
        c.mean = std::clamp((1 - alpha) * ca[k].mean + alpha * cb[k].mean, out.lo, out.hi);
        c.sd = alpha <= 0.5 ? ca[k].sd * std::pow(cb[k].sd / ca[k].sd, alpha)
                            : cb[k].sd * std::pow(ca[k].sd / cb[k].sd, 1 - alpha);
        weight_sum += c.weight;
    }
    for (auto& c : out.components) {
        c.weight /= weight_sum;
    }
    return out;
}

}  // namespace

Persona blend_personas(const Persona& a, const Persona& b, double alpha)
{
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw DomainError("blend alpha must lie in [0, 1]");
    }
    if (!same_feature_layout(a, b)) {
        throw IncomparableError("personas '" + a.id + "' and '" + b.id
                                + "' are defined over different feature registries");
    }
    Persona out;
    out.id = blend_id(a.id, b.id, alpha);
    out.name = a.name + " / " + b.name;
    out.context_tags = a.context_tags;
    for (const auto& t : b.context_tags) {
        if (std::find(out.context_tags.begin(), out.context_tags.end(), t) == out.context_tags.end()) {
            out.context_tags.push_back(t);
        }
    }
    out.pdfs.reserve(a.pdfs.size());
    for (std::size_t i = 0; i < a.pdfs.size(); ++i) {
        out.pdfs.push_back(blend_pdf(a.pdfs[i], b.pdfs[i], alpha));
    }
    return out;
}

}  // namespace vocalpersona
