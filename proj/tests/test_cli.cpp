#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vocalpersona/cli.hpp"
#include "vocalpersona/persona_store.hpp"
#include "vocalpersona/wav.hpp"

using namespace vocalpersona;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            row.push_back(cell);
        }
        rows.push_back(row);
    }
    return rows;
}

struct Fixture {
    fs::path dir;
    std::string bundle;

    Fixture()
    {
        static int n = 0;
        dir = fs::temp_directory_path() / ("vp_cli_" + std::to_string(n++) + "_" + std::to_string(std::rand()));
        fs::create_directories(dir);
        bundle = (dir / "starter.persona").string();
        save_bundle(build_starter_bundle(), bundle);
    }
    ~Fixture() { fs::remove_all(dir); }
};

}  // namespace

TEST_CASE("validate")
{
    Fixture fx;
    CHECK(run({"validate", "--bundle", fx.bundle}).code == cli::ok);

    std::ifstream in(fx.bundle);
    std::string text((std::istreambuf_iterator<char>(in)), {});
    text.replace(text.find("\"sd\": 10.0"), 10, "\"sd\": -1.0");
    const auto bad = (fx.dir / "bad.persona").string();
    std::ofstream(bad) << text;
    const auto r = run({"validate", "--bundle", bad});
    CHECK(r.code == cli::validation_failure);
    CHECK(r.err.find("sd-positive") != std::string::npos);
    CHECK(r.err.find("baseline") != std::string::npos);

    std::ofstream(bad) << "{\"format_version\": 99}";
    CHECK(run({"validate", "--bundle", bad}).code == cli::validation_failure);
    std::ofstream(bad) << "{ nope";
    CHECK(run({"validate", "--bundle", bad}).code == cli::validation_failure);
}

TEST_CASE("exit codes for usage and io problems")
{
    Fixture fx;
    ::unsetenv("PERSONA_BUNDLE");
    CHECK(run({"sample"}).code == cli::usage_error);
    CHECK(run({"frobnicate"}).code == cli::usage_error);
    CHECK(run({"validate", "--bundle", (fx.dir / "missing.persona").string()}).code == cli::io_error);
    CHECK(run({"sample", "--bundle", fx.bundle, "--persona", "nobody"}).code == cli::usage_error);
    CHECK(run({"sample", "--bundle", fx.bundle, "--macro", "grumpy=10"}).code == cli::usage_error);
    CHECK(run({"sample", "--bundle", fx.bundle, "--macro", "stern"}).code == cli::usage_error);
    CHECK(run({"sample", "--bundle", fx.bundle, "--macro", "stern=150"}).code == cli::usage_error);
    CHECK(run({"sample", "--bundle", fx.bundle, "--out", "/nonexistent/dir/x.csv"}).code == cli::io_error);
    CHECK(run({"synth", "--bundle", fx.bundle, "--text", "hi", "--out", "/nonexistent/dir/x.wav"}).code
          == cli::io_error);
}

TEST_CASE("bundle from the environment")
{
    Fixture fx;
    ::setenv("PERSONA_BUNDLE", fx.bundle.c_str(), 1);
    CHECK(run({"validate"}).code == cli::ok);
    ::unsetenv("PERSONA_BUNDLE");
}

TEST_CASE("sample output is deterministic CSV")
{
    Fixture fx;
    const auto a = run({"sample", "--bundle", fx.bundle, "--persona", "baseline", "-n", "5", "--seed", "9"});
    const auto b = run({"sample", "--bundle", fx.bundle, "--persona", "baseline", "-n", "5", "--seed", "9"});
    REQUIRE(a.code == cli::ok);
    CHECK(a.out == b.out);
    const auto rows = csv(a.out);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0][0] == "f0_mean");
    CHECK(rows[0].size() == 8);

    const auto neutral = run({"sample", "--bundle", fx.bundle, "-n", "5", "--seed", "9", "--macro", "stern=0"});
    CHECK(neutral.out == run({"sample", "--bundle", fx.bundle, "-n", "5", "--seed", "9"}).out);
    CHECK(run({"sample", "--bundle", fx.bundle, "--persona", "my authentic voice", "-n", "5", "--seed", "9"}).out
          == a.out);

    const auto stern = run({"sample", "--bundle", fx.bundle, "-n", "5", "--seed", "9", "--macro", "stern=100"});
    const auto srows = csv(stern.out);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::stod(srows[i][0]) < std::stod(rows[i][0]));
    }
}

TEST_CASE("sample mean over many draws")
{
    Fixture fx;
    const auto r = run({"sample", "--bundle", fx.bundle, "--persona", "baseline", "-n", "10000", "--seed", "0"});
    REQUIRE(r.code == cli::ok);
    const auto rows = csv(r.out);
    REQUIRE(rows.size() == 10001);
    double sum = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        sum += std::stod(rows[i][0]);
    }
    CHECK(std::abs(sum / 10000 - 120) <= 0.3);
}

TEST_CASE("sample to a file")
{
    Fixture fx;
    const auto path = (fx.dir / "s.csv").string();
    REQUIRE(run({"sample", "--bundle", fx.bundle, "-n", "3", "--out", path}).code == cli::ok);
    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)), {});
    CHECK(csv(text).size() == 4);
}

TEST_CASE("synth writes a reproducible wav")
{
    Fixture fx;
    const auto a = (fx.dir / "a.wav").string();
    const auto b = (fx.dir / "b.wav").string();
    for (const auto& path : {a, b}) {
        REQUIRE(run({"synth", "--bundle", fx.bundle, "--text", "watermelon", "--seed", "3", "--sample-rate",
                     "16000", "--out", path})
                    .code
                == cli::ok);
    }
    const auto wa = wav::read_file(a);
    CHECK(wa.sample_rate == 16000);
    CHECK(wa.pcm == wav::read_file(b).pcm);
    CHECK(run({"synth", "--bundle", fx.bundle, "--text", "x", "--sample-rate", "100", "--out", a}).code
          == cli::usage_error);
}

TEST_CASE("report")
{
    Fixture fx;
    const auto r = run({"report", "--bundle", fx.bundle});
    REQUIRE(r.code == cli::ok);
    const auto blank = r.out.find("\n\n");
    REQUIRE(blank != std::string::npos);
    const auto matrix = csv(r.out.substr(0, blank + 1));
    const auto sweep = csv(r.out.substr(blank + 2));

    REQUIRE(matrix.size() == 5);
    for (std::size_t i = 1; i < 5; ++i) {
        CHECK(std::stod(matrix[i][i]) == doctest::Approx(1.0).epsilon(1e-3));
        for (std::size_t j = 1; j < 5; ++j) {
            CHECK(matrix[i][j] == matrix[j][i]);
        }
    }

    REQUIRE(sweep[0] == std::vector<std::string>{"macro", "x", "persona", "feature", "component", "weight", "mean",
                                                 "sd", "lo", "hi"});
    const auto bundle = build_starter_bundle();
    std::size_t checked = 0;
    for (std::size_t i = 1; i < sweep.size(); ++i) {
        const auto& row = sweep[i];
        if (row[1] != "0") {
            continue;
        }
        const auto& pdf = bundle.persona(row[2]).pdf(row[3]);
        const auto& comp = pdf.components.at(std::stoul(row[4]));
        CHECK(std::stod(row[6]) == comp.mean);
        CHECK(std::stod(row[7]) == comp.sd);
        CHECK(std::stod(row[5]) == comp.weight);
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("init writes the starter bundle")
{
    Fixture fx;
    const auto path = (fx.dir / "init.persona").string();
    REQUIRE(run({"init", "--out", path}).code == cli::ok);
    CHECK(load_bundle(path) == build_starter_bundle());
}

TEST_CASE("number formatting round-trips")
{
    CHECK(cli::format_number(120) == "120");
    CHECK(cli::format_number(0.1) == "0.1");
    CHECK(std::stod(cli::format_number(1.0 / 3)) == 1.0 / 3);
}
