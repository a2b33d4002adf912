#include "vocalpersona/json_codec.hpp"

#include <algorithm>
#include <initializer_list>
#include <limits>
#include <set>

namespace vocalpersona::codec {

json to_json(const FeatureSpec& f)
{
    return {{"id", f.id}, {"name", f.name}, {"unit", f.unit},
            {"min", f.min}, {"max", f.max}, {"description", f.description}};
}

json to_json(const FeatureRegistry& reg)
{
    json features = json::array();
    for (const auto& f : reg.features) {
        features.push_back(to_json(f));
    }
    return {{"version", reg.version}, {"features", std::move(features)}};
}

json to_json(const MixtureComponent& c)
{
    return {{"weight", c.weight}, {"mean", c.mean}, {"sd", c.sd}};
}

json to_json(const FeaturePDF& pdf)
{
    json comps = json::array();
    for (const auto& c : pdf.components) {
        comps.push_back(to_json(c));
    }
    return {{"feature_id", pdf.feature_id}, {"lo", pdf.lo}, {"hi", pdf.hi}, {"components", std::move(comps)}};
}

json to_json(const Persona& p)
{
    json pdfs = json::array();
    for (const auto& pdf : p.pdfs) {
        pdfs.push_back(to_json(pdf));
    }
    return {{"id", p.id}, {"name", p.name}, {"context_tags", p.context_tags}, {"pdfs", std::move(pdfs)}};
}

json to_json(const MacroChannel& ch)
{
    json targets = json::array();
    for (auto t : ch.targets) {
        targets.push_back(std::string(to_string(t)));
    }
    return {{"feature_id", ch.feature_id},
            {"involvement", ch.involvement},
            {"transform",
             {{"kind", std::string(to_string(ch.transform.kind))}, {"sensitivity", ch.transform.sensitivity}}},
            {"targets", std::move(targets)}};
}

json to_json(const Macro& m)
{
    json channels = json::array();
    for (const auto& ch : m.channels) {
        channels.push_back(to_json(ch));
    }
    return {{"id", m.id}, {"name", m.name}, {"channels", std::move(channels)}};
}

json to_json(const PersonaBundle& b)
{
    json personas = json::array();
    for (const auto& p : b.personas) {
        personas.push_back(to_json(p));
    }
    json macros = json::array();
    for (const auto& m : b.macros) {
        macros.push_back(to_json(m));
    }
    return {{"format_version", b.format_version},
            {"registry", to_json(b.registry)},
            {"personas", std::move(personas)},
            {"macros", std::move(macros)}};
}

json to_json(const FeatureSample& s, const FeatureRegistry& reg)
{
    json values = json::object();
    json order = json::array();
    for (std::size_t n = 0; n < s.values.size() && n < reg.size(); ++n) {
        values[reg.features[n].id] = s.values[n];
        order.push_back(reg.features[n].id);
    }
    return {{"persona_id", s.persona_id}, {"seed", s.seed}, {"values", std::move(values)},
            {"order", std::move(order)}};
}

json to_json(const ValidationReport& report)
{
    json out = json::array();
    for (const auto& v : report) {
        out.push_back({{"subject", v.subject}, {"feature_id", v.feature_id}, {"rule", v.rule},
                       {"message", v.message}});
    }
    return out;
}

json to_json(const ActiveSelection& sel)
{
    if (const auto* blend = std::get_if<BlendSelection>(&sel)) {
        return {{"a", blend->persona_a}, {"b", blend->persona_b}, {"alpha", blend->alpha}};
    }
    return {{"persona_id", std::get<std::string>(sel)}};
}

json to_json(const SessionState& s)
{
    json values = json::object();
    for (const auto& [id, x] : s.macro_values) {
        values[id] = x;
    }
    return {{"session_id", s.session_id},
            {"active", to_json(s.active)},
            {"macro_values", std::move(values)},
            {"seed_counter", s.seed_counter}};
}

json to_json(const CurvePair& c)
{
    return {{"feature_id", c.feature_id}, {"x", c.x}, {"pre", c.pre}, {"post", c.post}};
}

namespace {

// Best-effort source location for a schema error: the first occurrence of
// the offending key in the original text.
struct Locator {
    std::string_view text;

    std::pair<std::size_t, std::size_t> find(std::string_view key) const
    {
        if (text.empty() || key.empty()) {
            return {1, 1};
        }
        const std::string quoted = "\"" + std::string(key) + "\"";
        const auto pos = text.find(quoted);
        if (pos == std::string_view::npos) {
            return {1, 1};
        }
        std::size_t line = 1;
        std::size_t col = 1;
        for (std::size_t i = 0; i < pos; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            }
            else {
                ++col;
            }
        }
        return {line, col};
    }
};

class Reader {
  public:
    Reader(const json& j, std::string path, const Locator& loc) : j_(j), path_(std::move(path)), loc_(loc) {}

    [[noreturn]] void fail(const std::string& what, std::string_view key = {}) const
    {
        auto [line, col] = loc_.find(key);
        throw ParseError(path_ + ": " + what, line, col);
    }

    void expect_object(std::initializer_list<std::string_view> allowed) const
    {
        if (!j_.is_object()) {
            fail("expected an object");
        }
        for (const auto& [key, _] : j_.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                fail("unknown field '" + key + "'", key);
            }
        }
        for (auto key : allowed) {
            if (!j_.contains(key)) {
                fail("missing field '" + std::string(key) + "'");
            }
        }
    }

    Reader at(std::string_view key) const { return {j_.at(std::string(key)), path_ + "." + std::string(key), loc_}; }

    Reader at(std::size_t i) const { return {j_.at(i), path_ + "[" + std::to_string(i) + "]", loc_}; }

    std::string string(std::string_view key) const
    {
        const auto& v = j_.at(std::string(key));
        if (!v.is_string()) {
            fail("field '" + std::string(key) + "' must be a string", key);
        }
        return v.get<std::string>();
    }

    double number(std::string_view key) const
    {
        const auto& v = j_.at(std::string(key));
        if (!v.is_number()) {
            fail("field '" + std::string(key) + "' must be a number", key);
        }
        return v.get<double>();
    }

    long long integer(std::string_view key) const
    {
        const auto& v = j_.at(std::string(key));
        if (!v.is_number_integer()) {
            fail("field '" + std::string(key) + "' must be an integer", key);
        }
        return v.get<long long>();
    }

    std::size_t array_size(std::string_view key) const
    {
        const auto& v = j_.at(std::string(key));
        if (!v.is_array()) {
            fail("field '" + std::string(key) + "' must be an array", key);
        }
        return v.size();
    }

    std::vector<std::string> strings(std::string_view key) const
    {
        const std::size_t n = array_size(key);
        std::vector<std::string> out;
        out.reserve(n);
        const auto& arr = j_.at(std::string(key));
        for (std::size_t i = 0; i < n; ++i) {
            if (!arr[i].is_string()) {
                fail("field '" + std::string(key) + "' must hold strings", key);
            }
            out.push_back(arr[i].get<std::string>());
        }
        return out;
    }

  private:
    const json& j_;
    std::string path_;
    const Locator& loc_;
};

int checked_int(const Reader& r, std::string_view key)
{
    const long long v = r.integer(key);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        r.fail("field '" + std::string(key) + "' out of range", key);
    }
    return static_cast<int>(v);
}

FeatureRegistry read_registry(const Reader& r)
{
    r.expect_object({"version", "features"});
    FeatureRegistry reg;
    reg.version = checked_int(r, "version");
    const std::size_t n = r.array_size("features");
    auto features = r.at("features");
    for (std::size_t i = 0; i < n; ++i) {
        auto f = features.at(i);
        f.expect_object({"id", "name", "unit", "min", "max", "description"});
        reg.features.push_back({f.string("id"), f.string("name"), f.string("unit"), f.number("min"),
                                f.number("max"), f.string("description")});
    }
    return reg;
}

Persona read_persona(const Reader& r)
{
    r.expect_object({"id", "name", "context_tags", "pdfs"});
    Persona p;
    p.id = r.string("id");
    p.name = r.string("name");
    p.context_tags = r.strings("context_tags");
    const std::size_t n = r.array_size("pdfs");
    auto pdfs = r.at("pdfs");
    for (std::size_t i = 0; i < n; ++i) {
        auto pr = pdfs.at(i);
        pr.expect_object({"feature_id", "lo", "hi", "components"});
        FeaturePDF pdf;
        pdf.feature_id = pr.string("feature_id");
        pdf.lo = pr.number("lo");
        pdf.hi = pr.number("hi");
        const std::size_t k = pr.array_size("components");
        auto comps = pr.at("components");
        for (std::size_t c = 0; c < k; ++c) {
            auto cr = comps.at(c);
            cr.expect_object({"weight", "mean", "sd"});
            pdf.components.push_back({cr.number("weight"), cr.number("mean"), cr.number("sd")});
        }
        p.pdfs.push_back(std::move(pdf));
    }
    return p;
}

Macro read_macro(const Reader& r)
{
    r.expect_object({"id", "name", "channels"});
    Macro m;
    m.id = r.string("id");
    m.name = r.string("name");
    const std::size_t n = r.array_size("channels");
    auto channels = r.at("channels");
    for (std::size_t i = 0; i < n; ++i) {
        auto cr = channels.at(i);
        cr.expect_object({"feature_id", "involvement", "transform", "targets"});
        MacroChannel ch;
        ch.feature_id = cr.string("feature_id");
        ch.involvement = cr.number("involvement");
        auto tr = cr.at("transform");
        tr.expect_object({"kind", "sensitivity"});
        try {
            ch.transform.kind = transform_kind_from_string(tr.string("kind"));
            ch.targets.clear();
            for (const auto& t : cr.strings("targets")) {
                ch.targets.push_back(macro_target_from_string(t));
            }
        }
        catch (const DomainError& e) {
            cr.fail(e.what(), "kind");
        }
        ch.transform.sensitivity = tr.number("sensitivity");
        m.channels.push_back(std::move(ch));
    }
    return m;
}

}  // namespace

FeatureRegistry registry_from_json(const json& j)
{
    Locator loc{};
    return read_registry(Reader(j, "registry", loc));
}

Persona persona_from_json(const json& j)
{
    Locator loc{};
    return read_persona(Reader(j, "persona", loc));
}

Macro macro_from_json(const json& j)
{
    Locator loc{};
    return read_macro(Reader(j, "macro", loc));
}

PersonaBundle bundle_from_json(const json& j, std::string_view source_text)
{
    Locator loc{source_text};
    Reader root(j, "$", loc);
    if (!j.is_object()) {
        root.fail("document must be an object");
    }
    if (!j.contains("format_version")) {
        root.fail("missing field 'format_version'");
    }
    const long long version = root.integer("format_version");
    if (version != current_format_version) {
        throw UnsupportedVersionError(version);
    }
    root.expect_object({"format_version", "registry", "personas", "macros"});

    PersonaBundle b;
    b.format_version = static_cast<int>(version);
    b.registry = read_registry(root.at("registry"));
    const std::size_t np = root.array_size("personas");
    auto personas = root.at("personas");
    for (std::size_t i = 0; i < np; ++i) {
        b.personas.push_back(read_persona(personas.at(i)));
    }
    const std::size_t nm = root.array_size("macros");
    auto macros = root.at("macros");
    for (std::size_t i = 0; i < nm; ++i) {
        b.macros.push_back(read_macro(macros.at(i)));
    }
    return b;
}

ActiveSelection selection_from_json(const json& j)
{
    Locator loc{};
    Reader r(j, "active", loc);
    if (!j.is_object()) {
        r.fail("expected an object");
    }
    if (j.contains("persona_id")) {
        r.expect_object({"persona_id"});
        return r.string("persona_id");
    }
    r.expect_object({"a", "b", "alpha"});
    return BlendSelection{r.string("a"), r.string("b"), r.number("alpha")};
}

}  // namespace vocalpersona::codec
