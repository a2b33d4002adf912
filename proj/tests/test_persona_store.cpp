#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "support/generators.hpp"
#include "vocalpersona/json_codec.hpp"
#include "vocalpersona/persona_store.hpp"

using namespace vocalpersona;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("vp_store_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter()
    {
        static int n = 0;
        return n;
    }
};

std::string read_text(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string starter_text()
{
    return serialize_bundle(build_starter_bundle());
}

std::string replace_once(std::string s, const std::string& from, const std::string& to)
{
    const auto at = s.find(from);
    REQUIRE(at != std::string::npos);
    return s.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("starter bundle validates and matches the shipped file")
{
    const auto b = build_starter_bundle();
    CHECK(validate_bundle(b).empty());
    CHECK(b.personas.front().id == "baseline");
    CHECK(read_text(VP_STARTER_BUNDLE_PATH) == serialize_bundle(b));
    CHECK(load_bundle(VP_STARTER_BUNDLE_PATH) == b);
}

TEST_CASE("canonical form is stable")
{
    const auto text = starter_text();
    CHECK(text.back() == '\n');
    CHECK(serialize_bundle(parse_bundle(text)) == text);

    const auto j = codec::json::parse(text);
    CHECK(j.dump(2) + "\n" == text);
}

TEST_CASE("round trip of fuzzed bundles")
{
    vptest::Fuzzer fz(99);
    TempDir dir;
    for (int i = 0; i < 100; ++i) {
        const auto b = fz.bundle();
        REQUIRE(validate_bundle(b).empty());
        const auto path = dir.path / "b.persona";
        save_bundle(b, path);
        const auto back = load_bundle(path);
        CHECK(back == b);
        CHECK(serialize_bundle(back) == read_text(path));
    }
}

TEST_CASE("unsupported version")
{
    const auto text = replace_once(starter_text(), "\"format_version\": 1", "\"format_version\": 99");
    try {
        parse_bundle(text);
        FAIL("expected UnsupportedVersionError");
    }
    catch (const UnsupportedVersionError& e) {
        CHECK(e.version() == 99);
    }
}

TEST_CASE("version is checked before the rest of the document")
{
    CHECK_THROWS_AS(parse_bundle(R"({"format_version": 2, "whatever": true})"), UnsupportedVersionError);
}

TEST_CASE("malformed JSON reports line and column")
{
    const std::string text = "{\n  \"format_version\": 1,\n  \"personas\": [,]\n}\n";
    try {
        parse_bundle(text);
        FAIL("expected ParseError");
    }
    catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.column() >= 16);
        CHECK(e.column() <= 17);
    }
}

TEST_CASE("schema errors are parse errors with a location")
{
    const auto text = replace_once(starter_text(), "\"unit\": \"Hz\"", "\"unit\": 5");
    try {
        parse_bundle(text);
        FAIL("expected ParseError");
    }
    catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("unit") != std::string::npos);
        CHECK(e.line() > 1);
    }
}

TEST_CASE("unknown fields are rejected")
{
    CHECK_THROWS_AS(parse_bundle(replace_once(starter_text(), "\"format_version\": 1", "\"format_version\": 1, \"extra\": 0")),
                    ParseError);
    CHECK_THROWS_AS(parse_bundle(replace_once(starter_text(), "\"involvement\"", "\"colour\": 1, \"involvement\"")),
                    ParseError);
    CHECK_THROWS_AS(parse_bundle(replace_once(starter_text(), "\"weight\"", "\"skew\": 0.1, \"weight\"")), ParseError);
}

TEST_CASE("invariant violations name persona, feature and rule")
{
    auto b = build_starter_bundle();
    b.personas[0].pdfs[0].components[0].sd = -1;
    const auto text = replace_once(starter_text(), "\"sd\": 10.0", "\"sd\": -1.0");
    try {
        parse_bundle(text);
        FAIL("expected ValidationError");
    }
    catch (const ValidationError& e) {
        REQUIRE(e.report().size() == 1);
        CHECK(e.report()[0].subject == "baseline");
        CHECK(e.report()[0].feature_id == "f0_mean");
        CHECK(e.report()[0].rule == "sd-positive");
    }
    CHECK_THROWS_AS(serialize_bundle(b), ValidationError);
}

TEST_CASE("invalid bundles are never written")
{
    TempDir dir;
    auto b = build_starter_bundle();
    b.macros[0].channels[0].feature_id = "vibrato";
    const auto path = dir.path / "orphan.persona";
    CHECK_THROWS_AS(save_bundle(b, path), ValidationError);
    CHECK_FALSE(fs::exists(path));
    CHECK(std::distance(fs::directory_iterator(dir.path), fs::directory_iterator{}) == 0);

    save_bundle(build_starter_bundle(), path);
    const auto before = read_text(path);
    CHECK_THROWS_AS(save_bundle(b, path), ValidationError);
    CHECK(read_text(path) == before);
}

TEST_CASE("storage errors")
{
    CHECK_THROWS_AS(load_bundle("/nonexistent/dir/x.persona"), StorageError);
    CHECK_THROWS_AS(save_bundle(build_starter_bundle(), "/nonexistent/dir/x.persona"), StorageError);
}

TEST_CASE("empty persona list is a valid bundle")
{
    auto b = build_starter_bundle();
    b.personas.clear();
    CHECK(validate_bundle(b).empty());
    CHECK(parse_bundle(serialize_bundle(b)) == b);
    CHECK_THROWS_AS(b.persona("baseline"), UnknownPersonaError);
}
