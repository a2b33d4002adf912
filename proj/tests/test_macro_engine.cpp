#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "vocalpersona/macro_engine.hpp"
#include "vocalpersona/persona_store.hpp"

using namespace vocalpersona;
using vptest::has_rule;

namespace {

MacroChannel exp_channel(std::string feature, double a, double w, std::vector<MacroTarget> targets = {MacroTarget::mean})
{
    return {std::move(feature), w, {TransformKind::exponential, a}, std::move(targets)};
}

}  // namespace

TEST_CASE("macro factor arithmetic")
{
    const auto two = exp_channel("z", std::numbers::ln2, 1.0);
    CHECK(macro_factor(two, 100) == 2.0);
    CHECK(std::abs(macro_factor(exp_channel("z", std::numbers::ln2, 0.5), 100) - std::numbers::sqrt2) < 1e-9);
    CHECK(macro_factor(two, 0) == 1.0);
    CHECK(macro_factor(exp_channel("z", 3.7, 0.0), 63) == 1.0);
    CHECK(macro_factor(exp_channel("z", 1.0, -1.0), 100) == doctest::Approx(std::exp(-1.0)));

    const MacroChannel lin{"z", 1.0, {TransformKind::linear, 0.5}, {MacroTarget::mean}};
    CHECK(macro_factor(lin, 100) == doctest::Approx(1.5));
    CHECK(macro_factor(lin, 50) == doctest::Approx(1.25));
    CHECK(macro_factor(lin, 0) == 1.0);

    CHECK_THROWS_AS(macro_factor(two, -1), DomainError);
    CHECK_THROWS_AS(macro_factor(two, 100.5), DomainError);
    CHECK_THROWS_AS(macro_factor(two, std::nan("")), DomainError);
}

TEST_CASE("transform kinds round-trip through strings")
{
    CHECK(transform_kind_from_string(to_string(TransformKind::linear)) == TransformKind::linear);
    CHECK(transform_kind_from_string("exponential") == TransformKind::exponential);
    CHECK_THROWS_AS(transform_kind_from_string("cubic"), DomainError);
    CHECK(macro_target_from_string("sd") == MacroTarget::sd);
}

TEST_CASE("two macros on one feature multiply")
{
    const auto reg = vptest::single_feature_registry(0, 400);
    const auto p = vptest::single_feature_persona("p", {{1, 120, 10}}, 50, 400);
    const std::vector<Macro> lib{{"m1", "m1", {exp_channel("z", std::log(1.2), 1)}},
                                 {"m2", "m2", {exp_channel("z", std::log(1.5), 1)}}};
    const auto out = apply_macros(p, lib, {{"m1", 100}, {"m2", 100}}, reg);
    CHECK(out.pdfs[0].components[0].mean == doctest::Approx(216.0).epsilon(1e-12));
    CHECK(out.pdfs[0].components[0].sd == 10.0);
}

TEST_CASE("means clamp to the truncation interval, sds to the width")
{
    const auto reg = vptest::single_feature_registry(0, 400);
    const auto p = vptest::single_feature_persona("p", {{1, 300, 100}}, 50, 400);
    const std::vector<Macro> lib{{"up", "up", {exp_channel("z", std::log(2.0), 1, {MacroTarget::mean, MacroTarget::sd})}},
                                 {"down", "down", {exp_channel("z", -30.0, 1, {MacroTarget::sd})}},
                                 {"wide", "wide", {exp_channel("z", std::log(5.0), 1, {MacroTarget::sd})}}};
    const auto up = apply_macros(p, lib, {{"up", 100}}, reg);
    CHECK(up.pdfs[0].components[0].mean == 400.0);
    CHECK(up.pdfs[0].components[0].sd == 200.0);
    CHECK(apply_macros(p, lib, {{"wide", 100}}, reg).pdfs[0].components[0].sd == 350.0);
    const auto down = apply_macros(p, lib, {{"down", 100}}, reg);
    CHECK(down.pdfs[0].components[0].sd == doctest::Approx(350e-6));
    CHECK(down.pdfs[0].lo == 50.0);
    CHECK(down.pdfs[0].hi == 400.0);
}

TEST_CASE("default library")
{
    const auto reg = build_default_registry();
    const auto lib = build_default_macro_library(reg);
    CHECK(lib.size() == 4);
    CHECK(validate_macro_library(reg, lib).empty());
    const auto& stern = find_macro(lib, "stern");
    REQUIRE(stern.channel_for("f0_mean") != nullptr);
    CHECK(macro_factor(*stern.channel_for("f0_mean"), 100) == doctest::Approx(0.85));
    CHECK(stern.channel_for("loudness") == nullptr);
    CHECK_THROWS_AS(find_macro(lib, "grumpy"), UnknownMacroError);
}

TEST_CASE("macro validation")
{
    const auto reg = build_default_registry();
    Macro m{"m", "m", {exp_channel("f0_mean", 0.1, 1)}};
    CHECK(validate_macro(reg, m).empty());

    m.channels.push_back(exp_channel("f0_mean", 0.2, 1));
    CHECK(has_rule(validate_macro(reg, m), "macro-duplicate-channel"));

    m.channels = {exp_channel("vibrato", 0.1, 1)};
    CHECK(has_rule(validate_macro(reg, m), "macro-unknown-feature"));

    m.channels = {{"f0_mean", 1, {TransformKind::linear, -1.0}, {MacroTarget::mean}}};
    CHECK(has_rule(validate_macro(reg, m), "linear-sensitivity"));

    m.channels = {exp_channel("f0_mean", 0.1, 1, {})};
    CHECK(has_rule(validate_macro(reg, m), "empty-targets"));

    CHECK(has_rule(validate_macro_set({{"a", 10}, {"a", 20}}), "duplicate-setting"));
    CHECK(has_rule(validate_macro_set({{"a", 101}}), "value-range"));
}

TEST_CASE("apply_macros error paths")
{
    const auto reg = build_default_registry();
    const auto lib = build_default_macro_library(reg);
    const auto p = build_starter_personas()[0];
    CHECK_THROWS_AS(apply_macros(p, lib, {{"grumpy", 10}}, reg), UnknownMacroError);
    CHECK_THROWS_AS(apply_macros(p, lib, {{"stern", 150}}, reg), DomainError);
    CHECK_THROWS_AS(apply_macros(vptest::single_feature_persona("q", {{1, 0, 1}}, -1, 1), lib, {}, reg),
                    IncomparableError);
}

TEST_CASE("stern only moves the features it declares")
{
    const auto reg = build_default_registry();
    const auto lib = build_default_macro_library(reg);
    const auto p = build_starter_personas()[0];
    const auto out = apply_macros(p, lib, {{"stern", 100}}, reg);
    const auto& stern = find_macro(lib, "stern");
    for (std::size_t n = 0; n < p.pdfs.size(); ++n) {
        CAPTURE(p.pdfs[n].feature_id);
        if (!stern.channel_for(p.pdfs[n].feature_id)) {
            CHECK(out.pdfs[n] == p.pdfs[n]);
        }
        else {
            CHECK_FALSE(out.pdfs[n] == p.pdfs[n]);
        }
    }
    CHECK(out.pdfs[0].components[0].mean < p.pdfs[0].components[0].mean);
    CHECK(out.id == p.id);
    CHECK(out.context_tags == p.context_tags);
}

TEST_CASE("neutral settings are the identity, bit for bit")
{
    vptest::Fuzzer fz(1);
    const auto reg = build_default_registry();
    const auto lib = build_default_macro_library(reg);
    MacroSet zeros;
    for (const auto& m : lib) {
        zeros.push_back({m.id, 0.0});
    }
    for (int i = 0; i < 50; ++i) {
        const auto p = fz.persona(reg, "p");
        CHECK(apply_macros(p, lib, zeros, reg) == p);
        CHECK(apply_macros(p, lib, {}, reg) == p);
    }
}

TEST_CASE("monotone response of one channel")
{
    const auto reg = build_default_registry();
    const auto lib = build_default_macro_library(reg);
    const auto p = build_starter_personas()[0];
    double prev = 1e300;
    for (double x = 0; x <= 100; x += 10) {
        const double mean = apply_macros(p, lib, {{"stern", x}}, reg).pdfs[0].components[0].mean;
        CHECK(mean <= prev);
        prev = mean;
    }
}

TEST_CASE("weights and bounds are never modified")
{
    vptest::Fuzzer fz(3);
    for (int i = 0; i < 30; ++i) {
        const auto bundle = fz.bundle();
        const auto set = fz.macro_set(bundle.macros);
        for (const auto& p : bundle.personas) {
            const auto out = apply_macros(p, bundle.macros, set, bundle.registry);
            CHECK(validate_persona(bundle.registry, out).empty());
            for (std::size_t n = 0; n < p.pdfs.size(); ++n) {
                CHECK(out.pdfs[n].lo == p.pdfs[n].lo);
                CHECK(out.pdfs[n].hi == p.pdfs[n].hi);
                for (std::size_t k = 0; k < p.pdfs[n].components.size(); ++k) {
                    CHECK(out.pdfs[n].components[k].weight == p.pdfs[n].components[k].weight);
                }
            }
        }
    }
}
