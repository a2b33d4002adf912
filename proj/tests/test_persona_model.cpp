#include <doctest.h>

#include <cmath>

#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "vocalpersona/persona_model.hpp"
#include "vocalpersona/persona_store.hpp"

using namespace vocalpersona;
using vptest::has_rule;
using vptest::single_feature_persona;

TEST_CASE("starter personas are valid")
{
    const auto reg = build_default_registry();
    for (const auto& p : build_starter_personas()) {
        CAPTURE(p.id);
        CHECK(validate_persona(reg, p).empty());
    }
}

TEST_CASE("mixture density and cdf")
{
    const FeaturePDF pdf{"z", {{0.3, -2, 1}, {0.7, 2, 0.5}}, -5, 5};
    const std::vector<vptest::oracle::Component> comps{{0.3, -2, 1}, {0.7, 2, 0.5}};
    for (double z = -4.5; z < 5; z += 0.5) {
        CHECK(pdf.cdf(z) == doctest::Approx(vptest::oracle::truncated_mixture_cdf(comps, -5, 5, z)).epsilon(1e-12));
    }
    CHECK(pdf.density(-6) == 0.0);
    CHECK(pdf.density(6) == 0.0);
}

TEST_CASE("validation reports name persona, feature and rule")
{
    const auto reg = build_default_registry();
    auto p = build_starter_personas()[0];

    SUBCASE("negative sd")
    {
        p.pdfs[0].components[0].sd = -1;
        const auto r = validate_persona(reg, p);
        REQUIRE(r.size() == 1);
        CHECK(r[0].subject == "baseline");
        CHECK(r[0].feature_id == "f0_mean");
        CHECK(r[0].rule == "sd-positive");
    }
    SUBCASE("weights not normalized")
    {
        p.pdfs[1].components[0].weight = 0.9;
        CHECK(has_rule(validate_persona(reg, p), "normalization"));
    }
    SUBCASE("negative weight")
    {
        p.pdfs[1].components = {{1.5, 6, 1}, {-0.5, 8, 1}};
        CHECK(has_rule(validate_persona(reg, p), "weight-nonnegative"));
    }
    SUBCASE("mean outside truncation")
    {
        p.pdfs[0].components[0].mean = 45;
        CHECK(has_rule(validate_persona(reg, p), "mean-within-truncation"));
    }
    SUBCASE("inverted truncation")
    {
        std::swap(p.pdfs[0].lo, p.pdfs[0].hi);
        CHECK(has_rule(validate_persona(reg, p), "truncation-bounds"));
    }
    SUBCASE("truncation outside physical bounds")
    {
        p.pdfs[0].hi = 500;
        CHECK(has_rule(validate_persona(reg, p), "truncation-within-feature"));
    }
    SUBCASE("missing feature gives exactly one coverage violation")
    {
        p.pdfs.pop_back();
        const auto r = validate_persona(reg, p);
        REQUIRE(r.size() == 1);
        CHECK(r[0].rule == "coverage");
        CHECK(r[0].feature_id == "jitter");
    }
    SUBCASE("features out of order")
    {
        std::swap(p.pdfs[0], p.pdfs[1]);
        CHECK(has_rule(validate_persona(reg, p), "order"));
    }
    SUBCASE("no components")
    {
        p.pdfs[2].components.clear();
        CHECK(has_rule(validate_persona(reg, p), "empty-components"));
    }
    SUBCASE("non-finite")
    {
        p.pdfs[2].components[0].mean = std::nan("");
        CHECK(has_rule(validate_persona(reg, p), "non-finite"));
    }
    SUBCASE("context tags")
    {
        p.context_tags = {"custom:office"};
        CHECK(validate_persona(reg, p).empty());
        p.context_tags = {"office"};
        CHECK(has_rule(validate_persona(reg, p), "context-tag"));
        p.context_tags = {"custom:"};
        CHECK(has_rule(validate_persona(reg, p), "context-tag"));
    }
    SUBCASE("empty id")
    {
        p.id.clear();
        CHECK(has_rule(validate_persona(reg, p), "empty-id"));
    }
}

TEST_CASE("space validation rejects duplicate persona ids")
{
    PersonaSpace space{build_default_registry(), build_starter_personas()};
    CHECK(validate_space(space).empty());
    space.personas[1].id = space.personas[0].id;
    CHECK(has_rule(validate_space(space), "duplicate-persona-id"));
    CHECK_THROWS_AS(space.at("nobody"), UnknownPersonaError);
}

TEST_CASE("bhattacharyya against the closed-form gaussian oracle")
{
    struct Case {
        double m1, s1, m2, s2;
    };
    for (const Case c : {Case{0, 1, 2, 1}, Case{0, 1, 0, 2}, Case{-1, 0.5, 1, 1.5}, Case{3, 2, 3, 2}}) {
        const auto a = single_feature_persona("a", {{1, c.m1, c.s1}}, -60, 60);
        const auto b = single_feature_persona("b", {{1, c.m2, c.s2}}, -60, 60);
        CHECK(persona_overlap(a, b)
              == doctest::Approx(vptest::oracle::gaussian_bhattacharyya(c.m1, c.s1, c.m2, c.s2)).epsilon(1e-3));
    }
    const auto a = single_feature_persona("a", {{1, 0, 1}}, -60, 60);
    const auto b = single_feature_persona("b", {{1, 2, 1}}, -60, 60);
    CHECK(std::abs(persona_overlap(a, b) - std::exp(-0.5)) < 1e-3);
}

TEST_CASE("overlap of disjoint supports is zero")
{
    const auto a = single_feature_persona("a", {{1, 1, 1}}, 0, 2);
    const auto b = single_feature_persona("b", {{1, 4, 1}}, 3, 5);
    CHECK(persona_overlap(a, b) == doctest::Approx(0.0));
}

TEST_CASE("overlap of a grid-unresolved spike")
{
    const auto spike = single_feature_persona("a", {{1, 0, 1e-6}}, -100, 100);
    const auto wide = single_feature_persona("b", {{1, 0, 10}}, -100, 100);
    CHECK(persona_overlap(spike, spike) == doctest::Approx(1.0).epsilon(1e-3));
    const double bc = persona_overlap(spike, wide);
    CHECK(bc >= 0.0);
    CHECK(bc < 0.1);
}

TEST_CASE("overlap properties over fuzzed personas")
{
    vptest::Fuzzer fz(11);
    const auto reg = build_default_registry();
    for (int i = 0; i < 40; ++i) {
        const auto a = fz.persona(reg, "a");
        const auto b = fz.persona(reg, "b");
        const double ab = persona_overlap(a, b);
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        CHECK(ab == persona_overlap(b, a));
        CHECK(persona_overlap(a, a) == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("overlap requires matching layouts")
{
    const auto a = single_feature_persona("a", {{1, 0, 1}}, -5, 5);
    auto b = a;
    b.pdfs[0].feature_id = "y";
    CHECK_THROWS_AS(persona_overlap(a, b), IncomparableError);
    CHECK_THROWS_AS(blend_personas(a, b, 0.5), IncomparableError);
}

TEST_CASE("blend midpoint of single components")
{
    const auto a = single_feature_persona("a", {{1, 100, 10}}, 50, 400);
    const auto b = single_feature_persona("b", {{1, 200, 40}}, 50, 400);
    const auto m = blend_personas(a, b, 0.5);
    REQUIRE(m.pdfs[0].components.size() == 1);
    CHECK(m.pdfs[0].components[0].mean == 150.0);
    CHECK(m.pdfs[0].components[0].sd == 20.0);
    CHECK(m.pdfs[0].components[0].weight == 1.0);
    CHECK(m.id == "blend(a,b,0.5)");
}

TEST_CASE("blend endpoints and domain")
{
    const auto ps = build_starter_personas();
    for (const auto& a : ps) {
        for (const auto& b : ps) {
            CHECK(persona_overlap(blend_personas(a, b, 0), a) >= 0.999);
            CHECK(persona_overlap(blend_personas(a, b, 1), b) >= 0.999);
        }
    }
    CHECK_THROWS_AS(blend_personas(ps[0], ps[1], -0.01), DomainError);
    CHECK_THROWS_AS(blend_personas(ps[0], ps[1], 1.2), DomainError);
    CHECK_THROWS_AS(blend_personas(ps[0], ps[1], std::nan("")), DomainError);
}

TEST_CASE("blends of fuzzed personas stay valid and move monotonically")
{
    vptest::Fuzzer fz(5);
    const auto reg = build_default_registry();
    for (int i = 0; i < 30; ++i) {
        const auto a = fz.persona(reg, "a");
        const auto b = fz.persona(reg, "b");
        double prev = 1.0 + 1e-9;
        for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            const auto m = blend_personas(a, b, alpha);
            CHECK(validate_persona_shape(m).empty());
            const double to_a = persona_overlap(m, a);
            CHECK(to_a <= prev + 1e-6);
            prev = to_a;
        }
    }
}

TEST_CASE("blended tags are the union")
{
    auto a = single_feature_persona("a", {{1, 0, 1}}, -5, 5);
    auto b = a;
    b.id = "b";
    a.context_tags = {"physical"};
    b.context_tags = {"performative", "physical"};
    const auto m = blend_personas(a, b, 0.3);
    CHECK(m.context_tags.size() == 2);
}
