#include "vocalpersona/persona_store.hpp"

#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <system_error>

#include "vocalpersona/json_codec.hpp"

namespace vocalpersona {

const Persona& PersonaBundle::persona(std::string_view id) const
{
    for (const auto& p : personas) {
        if (p.id == id) {
            return p;
        }
    }
    throw UnknownPersonaError(std::string(id));
}

ValidationReport validate_bundle(const PersonaBundle& b)
{
    ValidationReport out;
    if (b.format_version != current_format_version) {
        out.push_back({"bundle", "", "format-version", "format_version must be 1"});
    }
    auto reg = validate_registry(b.registry);
    out.insert(out.end(), reg.begin(), reg.end());

    std::set<std::string> ids;
    for (const auto& p : b.personas) {
        if (!ids.insert(p.id).second) {
            out.push_back({p.id, "", "duplicate-persona-id", "persona id appears more than once"});
        }
        auto r = validate_persona(b.registry, p);
        out.insert(out.end(), r.begin(), r.end());
    }
    auto macros = validate_macro_library(b.registry, b.macros);
    out.insert(out.end(), macros.begin(), macros.end());
    return out;
}

std::string serialize_bundle(const PersonaBundle& b)
{
    if (auto report = validate_bundle(b); !report.empty()) {
        throw ValidationError(std::move(report));
    }
    return codec::to_json(b).dump(2) + "\n";
}

PersonaBundle parse_bundle(std::string_view text)
{
    codec::json doc;
    try {
        doc = codec::json::parse(text.begin(), text.end());
    }
    catch (const codec::json::parse_error& e) {
        // byte is 1-based and points just past the offending character.
        const std::size_t byte = e.byte == 0 ? 0 : e.byte - 1;
        std::size_t line = 1;
        std::size_t col = 1;
        for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            }
            else {
                ++col;
            }
        }
        std::string what = e.what();
        if (auto pos = what.find("syntax error"); pos != std::string::npos) {
            what = what.substr(pos);
        }
        throw ParseError(what, line, col);
    }
    PersonaBundle b = codec::bundle_from_json(doc, text);
    if (auto report = validate_bundle(b); !report.empty()) {
        throw ValidationError(std::move(report));
    }
    return b;
}

void save_bundle(const PersonaBundle& b, const std::filesystem::path& path)
{
    const std::string text = serialize_bundle(b);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) {
            throw StorageError("cannot open '" + tmp.string() + "' for writing");
        }
        os.write(text.data(), static_cast<std::streamsize>(text.size()));
        os.flush();
        if (!os) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw StorageError("failed writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        throw StorageError("cannot replace '" + path.string() + "': " + ec.message());
    }
}

PersonaBundle load_bundle(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw StorageError("cannot open '" + path.string() + "'");
    }
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (is.bad()) {
        throw StorageError("failed reading '" + path.string() + "'");
    }
    return parse_bundle(text);
}

namespace {

FeaturePDF single(std::string feature, double mean, double sd, double lo, double hi)
{
    return {std::move(feature), {{1.0, mean, sd}}, lo, hi};
}

FeaturePDF mixture(std::string feature, std::vector<MixtureComponent> comps, double lo, double hi)
{
    return {std::move(feature), std::move(comps), lo, hi};
}

}  // namespace

std::vector<Persona> build_starter_personas()
{
    std::vector<Persona> out;

    out.push_back({"baseline",
                   "my authentic voice",
                   {"baseline"},
                   {single("f0_mean", 120, 10, 50, 400),
                    single("f0_range", 6, 1.5, 0, 24),
                    single("speech_rate", 4.5, 0.4, 1, 10),
                    single("pause_scale", 1.0, 0.15, 0.25, 4),
                    single("loudness", 0, 2, -20, 20),
                    single("spectral_tilt", -12, 1.5, -24, 0),
                    single("breathiness", 0.15, 0.05, 0, 1),
                    single("jitter", 0.05, 0.02, 0, 1)}});

    out.push_back({"meeting_with_clients",
                   "meeting with clients",
                   {"sociocultural", "technological"},
                   {mixture("f0_mean", {{0.7, 128, 8}, {0.3, 145, 10}}, 80, 250),
                    single("f0_range", 7, 1.5, 2, 14),
                    single("speech_rate", 4.2, 0.3, 3, 6),
                    single("pause_scale", 1.1, 0.15, 0.5, 2),
                    single("loudness", 2, 1.5, -6, 10),
                    single("spectral_tilt", -10, 1.5, -18, -4),
                    single("breathiness", 0.1, 0.04, 0, 0.5),
                    single("jitter", 0.04, 0.015, 0, 0.3)}});

    out.push_back({"chatting_with_family",
                   "chatting with family",
                   {"sociocultural", "physical"},
                   {mixture("f0_mean", {{0.6, 125, 12}, {0.4, 150, 15}}, 70, 280),
                    mixture("f0_range", {{0.5, 8, 2}, {0.5, 12, 2.5}}, 2, 20),
                    single("speech_rate", 5.0, 0.6, 2.5, 8),
                    single("pause_scale", 0.9, 0.2, 0.4, 2),
                    single("loudness", 0, 3, -10, 10),
                    single("spectral_tilt", -11, 2, -20, -3),
                    single("breathiness", 0.2, 0.07, 0, 0.6),
                    single("jitter", 0.06, 0.02, 0, 0.3)}});

    out.push_back({"delivering_a_speech",
                   "delivering a speech",
                   {"performative", "physical", "technological"},
                   {mixture("f0_mean", {{0.5, 150, 12}, {0.5, 180, 15}}, 90, 320),
                    single("f0_range", 14, 2.5, 4, 24),
                    single("speech_rate", 3.2, 0.3, 1.5, 5),
                    mixture("pause_scale", {{0.6, 1.8, 0.25}, {0.4, 2.6, 0.3}}, 0.8, 4),
                    single("loudness", 8, 2, 0, 18),
                    single("spectral_tilt", -7, 1.5, -14, -2),
                    single("breathiness", 0.06, 0.03, 0, 0.3),
                    single("jitter", 0.03, 0.01, 0, 0.2)}});

    return out;
}

PersonaBundle build_starter_bundle()
{
    PersonaBundle b;
    b.registry = build_default_registry();
    b.personas = build_starter_personas();
    b.macros = build_default_macro_library(b.registry);
    return b;
}

}  // namespace vocalpersona
