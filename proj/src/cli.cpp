#include "vocalpersona/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "vocalpersona/control_service.hpp"
#include "vocalpersona/http_api.hpp"
#include "vocalpersona/persona_store.hpp"
#include "vocalpersona/wav.hpp"

namespace vocalpersona::cli {

std::string format_number(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

namespace {

/// Failure carrying its exit code and message.
struct Exit {
    int code;
    std::string message;
};

struct CommonOptions {
    std::string bundle;
    std::string persona;
    std::vector<std::string> macros;
    std::uint64_t seed = 0;
    std::string out;
};

std::string resolve_bundle_path(const std::string& flag)
{
    if (!flag.empty()) {
        return flag;
    }
    if (const char* env = std::getenv("PERSONA_BUNDLE"); env && *env) {
        return env;
    }
    throw Exit{usage_error, "no bundle given: pass --bundle PATH or set PERSONA_BUNDLE"};
}

PersonaBundle load(const std::string& flag)
{
    const std::string path = resolve_bundle_path(flag);
    try {
        return load_bundle(path);
    }
    catch (const StorageError& e) {
        throw Exit{io_error, e.what()};
    }
    catch (const ValidationError& e) {
        std::string msg = "bundle '" + path + "' is invalid:";
        for (const auto& v : e.report()) {
            msg += "\n" + format_violation(v);
        }
        throw Exit{validation_failure, msg};
    }
    catch (const Error& e) {
        throw Exit{validation_failure, path + ": " + e.what()};
    }
}

const Persona& resolve_persona(const PersonaBundle& b, const std::string& key)
{
    if (b.personas.empty()) {
        throw Exit{usage_error, "bundle contains no personas"};
    }
    if (key.empty()) {
        return b.personas.front();
    }
    for (const auto& p : b.personas) {
        if (p.id == key) {
            return p;
        }
    }
    for (const auto& p : b.personas) {
        if (p.name == key) {
            return p;
        }
    }
    throw Exit{usage_error, "unknown persona '" + key + "'"};
}

MacroSet parse_macros(const PersonaBundle& b, const std::vector<std::string>& assignments)
{
    MacroSet set;
    for (const auto& a : assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw Exit{usage_error, "--macro expects NAME=X, got '" + a + "'"};
        }
        const std::string id = a.substr(0, eq);
        const std::string value = a.substr(eq + 1);
        double x = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
        if (ec != std::errc{} || ptr != value.data() + value.size()) {
            throw Exit{usage_error, "--macro value for '" + id + "' is not a number"};
        }
        if (!(x >= macro_min_value && x <= macro_max_value)) {
            throw Exit{usage_error, "--macro value for '" + id + "' must lie in [0, 100]"};
        }
        try {
            find_macro(b.macros, id);
        }
        catch (const UnknownMacroError& e) {
            throw Exit{usage_error, e.what()};
        }
        for (auto& s : set) {
            if (s.macro_id == id) {
                throw Exit{usage_error, "macro '" + id + "' given more than once"};
            }
        }
        set.push_back({id, x});
    }
    return set;
}

std::string sample_header(const FeatureRegistry& reg)
{
    std::string line;
    for (std::size_t n = 0; n < reg.size(); ++n) {
        line += (n ? "," : "") + reg.features[n].id;
    }
    return line + "\n";
}

std::string sample_row(const FeatureSample& s)
{
    std::string line;
    for (std::size_t n = 0; n < s.values.size(); ++n) {
        line += (n ? "," : "") + format_number(s.values[n]);
    }
    return line + "\n";
}

/// Writes to --out when given, otherwise to `out`.
void emit(const std::string& text, const std::string& path, std::ostream& out)
{
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os || !(os << text) || !os.flush()) {
        throw Exit{io_error, "cannot write '" + path + "'"};
    }
}

int cmd_validate(const CommonOptions& o, std::ostream& out)
{
    const PersonaBundle b = load(o.bundle);
    out << "ok: " << b.registry.size() << " features, " << b.personas.size() << " personas, "
        << b.macros.size() << " macros\n";
    return ok;
}

int cmd_sample(const CommonOptions& o, std::size_t count, std::ostream& out)
{
    const PersonaBundle b = load(o.bundle);
    const Persona& base = resolve_persona(b, o.persona);
    const MacroSet set = parse_macros(b, o.macros);
    const Persona p = apply_macros(base, b.macros, set, b.registry);

    std::string csv = sample_header(b.registry);
    for (std::size_t i = 0; i < count; ++i) {
        csv += sample_row(sample_features(p, o.seed + i));
    }
    emit(csv, o.out, out);
    return ok;
}

int cmd_synth(const CommonOptions& o, const std::string& text, int sample_rate, std::ostream& out)
{
    if (o.out.empty()) {
        throw Exit{usage_error, "synth needs --out PATH for the WAV file"};
    }
    if (text.empty()) {
        throw Exit{usage_error, "synth needs non-empty --text"};
    }
    const PersonaBundle b = load(o.bundle);
    const Persona& base = resolve_persona(b, o.persona);
    const MacroSet set = parse_macros(b, o.macros);
    const Persona p = apply_macros(base, b.macros, set, b.registry);
    const FeatureSample sample = sample_features(p, o.seed);

    AudioBuffer audio;
    try {
        audio = SourceFilterBackend(b.registry).render({text, sample, sample_rate, o.seed});
    }
    catch (const ConfigurationError& e) {
        throw Exit{usage_error, e.what()};
    }
    try {
        wav::write_file(o.out, audio);
    }
    catch (const StorageError& e) {
        throw Exit{io_error, e.what()};
    }
    out << sample_header(b.registry) << sample_row(sample);
    return ok;
}

std::string overlap_matrix_csv(const PersonaBundle& b)
{
    std::string csv = "persona";
    for (const auto& p : b.personas) {
        csv += "," + p.id;
    }
    csv += "\n";
    const std::size_t n = b.personas.size();
    std::vector<double> m(n * n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            m[i * n + j] = m[j * n + i] = persona_overlap(b.personas[i], b.personas[j]);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        csv += b.personas[i].id;
        for (std::size_t j = 0; j < n; ++j) {
            csv += "," + format_number(m[i * n + j]);
        }
        csv += "\n";
    }
    return csv;
}

std::string macro_sweep_csv(const PersonaBundle& b)
{
    std::string csv = "macro,x,persona,feature,component,weight,mean,sd,lo,hi\n";
    for (const auto& m : b.macros) {
        for (double x : {0.0, 25.0, 50.0, 75.0, 100.0}) {
            for (const auto& base : b.personas) {
                const Persona eff = apply_macros(base, b.macros, {{m.id, x}}, b.registry);
                for (const auto& pdf : eff.pdfs) {
                    for (std::size_t k = 0; k < pdf.components.size(); ++k) {
                        const auto& c = pdf.components[k];
                        csv += m.id + "," + format_number(x) + "," + base.id + "," + pdf.feature_id + ","
                               + std::to_string(k) + "," + format_number(c.weight) + ","
                               + format_number(c.mean) + "," + format_number(c.sd) + ","
                               + format_number(pdf.lo) + "," + format_number(pdf.hi) + "\n";
                    }
                }
            }
        }
    }
    return csv;
}

int cmd_report(const CommonOptions& o, std::ostream& out)
{
    const PersonaBundle b = load(o.bundle);
    emit(overlap_matrix_csv(b) + "\n" + macro_sweep_csv(b), o.out, out);
    return ok;
}

int cmd_serve(const CommonOptions& o, const std::string& host, int port, std::ostream& out)
{
    PersonaBundle b = load(o.bundle);
    ControlService service(std::move(b));
    HttpApi api(service);
    int bound = 0;
    try {
        bound = api.bind(host, port);
    }
    catch (const ConfigurationError& e) {
        throw Exit{io_error, e.what()};
    }
    out << "serving on http://" << host << ":" << bound << std::endl;
    api.listen();
    return ok;
}

int cmd_init(const CommonOptions& o, std::ostream& out)
{
    if (o.out.empty()) {
        throw Exit{usage_error, "init needs --out PATH"};
    }
    try {
        save_bundle(build_starter_bundle(), o.out);
    }
    catch (const StorageError& e) {
        throw Exit{io_error, e.what()};
    }
    out << "wrote starter bundle to " << o.out << "\n";
    return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Vocal persona engine: persona bundles, macro control, sampling and rendering", "vpersona"};
    app.require_subcommand(1);

    CommonOptions o;
    auto add_bundle = [&](CLI::App* c) { c->add_option("--bundle", o.bundle, "Persona bundle (.persona)"); };
    auto add_persona = [&](CLI::App* c) { c->add_option("--persona", o.persona, "Persona id or name (default: first in bundle)"); };
    auto add_macro = [&](CLI::App* c) {
        c->add_option("--macro", o.macros, "Macro setting NAME=X with X in [0,100]")->allow_extra_args(false);
    };
    auto add_seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "Sampling seed"); };

    auto* validate = app.add_subcommand("validate", "Load and validate a bundle");
    add_bundle(validate);

    std::size_t count = 1;
    auto* sample = app.add_subcommand("sample", "Emit sampled feature values as CSV");
    add_bundle(sample);
    add_persona(sample);
    add_macro(sample);
    add_seed(sample);
    sample->add_option("-n,--count", count, "Number of draws (seeds seed..seed+n-1)")
        ->check(CLI::PositiveNumber);
    sample->add_option("--out", o.out, "Write CSV here instead of stdout");

    std::string text;
    int sample_rate = default_sample_rate;
    auto* synth = app.add_subcommand("synth", "Render one utterance to a WAV file");
    add_bundle(synth);
    add_persona(synth);
    add_macro(synth);
    add_seed(synth);
    synth->add_option("--text", text, "Utterance text")->required();
    synth->add_option("--out", o.out, "Output WAV path");
    synth->add_option("--sample-rate", sample_rate, "Output sample rate");

    auto* report = app.add_subcommand("report", "Overlap matrix and macro sweep tables as CSV");
    add_bundle(report);
    report->add_option("--out", o.out, "Write CSV here instead of stdout");

    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serve = app.add_subcommand("serve", "Run the HTTP control service");
    add_bundle(serve);
    serve->add_option("--host", host, "Listen address");
    serve->add_option("--port", port, "Listen port (0 picks a free port)");

    auto* init = app.add_subcommand("init", "Write the starter bundle");
    init->add_option("--out", o.out, "Destination .persona path");

    std::vector<const char*> argv{"vpersona"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    }
    catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    }
    catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return usage_error;
    }

    try {
        if (validate->parsed()) {
            return cmd_validate(o, out);
        }
        if (sample->parsed()) {
            return cmd_sample(o, count, out);
        }
        if (synth->parsed()) {
            return cmd_synth(o, text, sample_rate, out);
        }
        if (report->parsed()) {
            return cmd_report(o, out);
        }
        if (serve->parsed()) {
            return cmd_serve(o, host, port, out);
        }
        if (init->parsed()) {
            return cmd_init(o, out);
        }
    }
    catch (const Exit& e) {
        err << "error: " << e.message << "\n";
        return e.code;
    }
    catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return validation_failure;
    }
    return usage_error;
}

}  // namespace vocalpersona::cli
