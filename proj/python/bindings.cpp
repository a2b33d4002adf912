#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "vocalpersona/control_service.hpp"
#include "vocalpersona/json_codec.hpp"
#include "vocalpersona/macro_engine.hpp"
#include "vocalpersona/persona_store.hpp"
#include "vocalpersona/render_backend.hpp"
#include "vocalpersona/sampler.hpp"
#include "vocalpersona/wav.hpp"

namespace py = pybind11;
using namespace vocalpersona;

namespace {

using BundlePtr = std::shared_ptr<const PersonaBundle>;

MacroSet to_macro_set(const std::map<std::string, double>& values)
{
    MacroSet set;
    for (const auto& [id, x] : values) {
        set.push_back({id, x});
    }
    return set;
}

Persona effective(const PersonaBundle& b, const std::string& persona_id, const std::map<std::string, double>& macros)
{
    return apply_macros(b.persona(persona_id), b.macros, to_macro_set(macros), b.registry);
}

py::bytes wav_bytes(const AudioBuffer& audio)
{
    const auto bytes = wav::encode(audio);
    return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}

std::vector<std::string> ids_of(const auto& items)
{
    std::vector<std::string> out;
    for (const auto& i : items) {
        out.push_back(i.id);
    }
    return out;
}

class Session {
  public:
    explicit Session(BundlePtr b) : state_(create_session(std::move(b))) {}

    std::string id() const { return state_.session_id; }
    void set_macro(const std::string& macro_id, double x) { state_ = vocalpersona::set_macro(state_, macro_id, x); }
    void select(const std::string& persona_id) { state_ = select_active(state_, persona_id); }
    void select_blend(const std::string& a, const std::string& b, double alpha)
    {
        state_ = select_active(state_, BlendSelection{a, b, alpha});
    }
    std::string state_json() const { return codec::to_json(state_).dump(); }
    std::string effective_json() const { return codec::to_json(effective_persona(state_)).dump(); }
    std::string curves_json(const std::string& feature_id) const
    {
        return codec::to_json(get_curves(state_, feature_id)).dump();
    }

    py::tuple synthesize(const std::string& text, std::optional<std::uint64_t> seed)
    {
        SynthesisResult r = [&] {
            py::gil_scoped_release release;
            return vocalpersona::synthesize(state_, text, seed);
        }();
        state_ = r.state;
        return py::make_tuple(wav_bytes(r.audio), r.seed, r.sample.values);
    }

  private:
    SessionState state_;
};

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Vocal persona engine core";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<IncomparableError>(m, "IncomparableError", base.ptr());
    py::register_exception<UnknownMacroError>(m, "UnknownMacroError", base.ptr());
    py::register_exception<UnknownPersonaError>(m, "UnknownPersonaError", base.ptr());
    py::register_exception<UnknownFeatureError>(m, "UnknownFeatureError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<UnsupportedVersionError>(m, "UnsupportedVersionError", base.ptr());
    py::register_exception<StorageError>(m, "StorageError", base.ptr());
    py::register_exception<ConfigurationError>(m, "ConfigurationError", base.ptr());

    py::class_<PersonaBundle, std::shared_ptr<PersonaBundle>>(m, "Bundle")
        .def_static("starter", [] { return std::make_shared<PersonaBundle>(build_starter_bundle()); })
        .def_static("parse", [](const std::string& text) { return std::make_shared<PersonaBundle>(parse_bundle(text)); })
        .def_static("load", [](const std::filesystem::path& p) { return std::make_shared<PersonaBundle>(load_bundle(p)); })
        .def("save", [](const PersonaBundle& b, const std::filesystem::path& p) { save_bundle(b, p); })
        .def("to_json", &serialize_bundle)
        .def_property_readonly("persona_ids", [](const PersonaBundle& b) { return ids_of(b.personas); })
        .def_property_readonly("macro_ids", [](const PersonaBundle& b) { return ids_of(b.macros); })
        .def_property_readonly("feature_ids", [](const PersonaBundle& b) { return ids_of(b.registry.features); })
        .def("__eq__", [](const PersonaBundle& a, const PersonaBundle& b) { return a == b; });

    m.def("macro_factor",
          [](const std::string& kind, double sensitivity, double involvement, double x) {
              const MacroChannel ch{"", involvement, {transform_kind_from_string(kind), sensitivity}, {MacroTarget::mean}};
              return macro_factor(ch, x);
          },
          py::arg("kind"), py::arg("sensitivity"), py::arg("involvement"), py::arg("x"));

    m.def("apply_macros",
          [](const PersonaBundle& b, const std::string& persona_id, const std::map<std::string, double>& macros) {
              return codec::to_json(effective(b, persona_id, macros)).dump();
          },
          py::arg("bundle"), py::arg("persona_id"), py::arg("macros") = std::map<std::string, double>{});

    m.def("overlap",
          [](const PersonaBundle& b, const std::string& a, const std::string& c) {
              return persona_overlap(b.persona(a), b.persona(c));
          },
          py::arg("bundle"), py::arg("a"), py::arg("b"));

    m.def("blend",
          [](const PersonaBundle& b, const std::string& a, const std::string& c, double alpha) {
              return codec::to_json(blend_personas(b.persona(a), b.persona(c), alpha)).dump();
          },
          py::arg("bundle"), py::arg("a"), py::arg("b"), py::arg("alpha"));

    m.def("sample",
          [](const PersonaBundle& b, const std::string& persona_id, std::uint64_t seed,
             const std::map<std::string, double>& macros, std::size_t count) {
              const Persona p = effective(b, persona_id, macros);
              std::vector<std::vector<double>> rows;
              for (std::size_t i = 0; i < count; ++i) {
                  rows.push_back(sample_features(p, seed + i).values);
              }
              return rows;
          },
          py::arg("bundle"), py::arg("persona_id"), py::arg("seed") = 0,
          py::arg("macros") = std::map<std::string, double>{}, py::arg("count") = 1);

    m.def("synthesize",
          [](const PersonaBundle& b, const std::string& persona_id, const std::string& text, std::uint64_t seed,
             const std::map<std::string, double>& macros, int sample_rate) {
              const FeatureSample s = sample_features(effective(b, persona_id, macros), seed);
              AudioBuffer audio;
              {
                  py::gil_scoped_release release;
                  audio = SourceFilterBackend(b.registry).render({text, s, sample_rate, seed});
              }
              return py::make_tuple(wav_bytes(audio), s.values);
          },
          py::arg("bundle"), py::arg("persona_id"), py::arg("text"), py::arg("seed") = 0,
          py::arg("macros") = std::map<std::string, double>{}, py::arg("sample_rate") = default_sample_rate);

    m.def("estimate_syllables", [](const std::string& text) { return estimate_syllables(text); });

    py::class_<Session>(m, "Session")
        .def(py::init([](std::shared_ptr<PersonaBundle> b) { return Session(std::move(b)); }))
        .def_property_readonly("id", &Session::id)
        .def("set_macro", &Session::set_macro, py::arg("macro_id"), py::arg("x"))
        .def("select", &Session::select, py::arg("persona_id"))
        .def("select_blend", &Session::select_blend, py::arg("a"), py::arg("b"), py::arg("alpha"))
        .def("state_json", &Session::state_json)
        .def("effective_json", &Session::effective_json)
        .def("curves_json", &Session::curves_json, py::arg("feature_id"))
        .def("synthesize", &Session::synthesize, py::arg("text"), py::arg("seed") = std::nullopt);
}
