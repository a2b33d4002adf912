#include "vocalpersona/http_api.hpp"

#include <atomic>
#include <thread>

#include <httplib.h>

#include "vocalpersona/json_codec.hpp"
#include "vocalpersona/wav.hpp"

namespace vocalpersona {

namespace {

using codec::json;

constexpr const char* json_type = "application/json";

void send_json(httplib::Response& res, const json& body, int status = 200)
{
    res.status = status;
    res.set_content(body.dump(), json_type);
}

void send_error(httplib::Response& res, int status, std::string_view kind, const std::string& message,
                const ValidationReport* report = nullptr)
{
    json err = {{"kind", kind}, {"message", message}};
    if (report) {
        err["violations"] = codec::to_json(*report);
    }
    send_json(res, {{"error", std::move(err)}}, status);
}

// Runs `fn`, translating library errors into HTTP statuses.
template <class Fn>
void guarded(httplib::Response& res, Fn&& fn)
{
    try {
        fn();
    }
    catch (const ValidationError& e) {
        send_error(res, 422, "validation", e.what(), &e.report());
    }
    catch (const UnknownSessionError& e) {
        send_error(res, 404, "unknown-session", e.what());
    }
    catch (const UnknownPersonaError& e) {
        send_error(res, 404, "unknown-persona", e.what());
    }
    catch (const UnknownMacroError& e) {
        send_error(res, 404, "unknown-macro", e.what());
    }
    catch (const UnknownFeatureError& e) {
        send_error(res, 404, "unknown-feature", e.what());
    }
    catch (const DomainError& e) {
        send_error(res, 400, "domain", e.what());
    }
    catch (const ParseError& e) {
        send_error(res, 400, "parse", e.what());
    }
    catch (const json::exception& e) {
        send_error(res, 400, "parse", e.what());
    }
    catch (const Error& e) {
        send_error(res, 500, "internal", e.what());
    }
}

json parse_body(const httplib::Request& req)
{
    if (req.body.empty()) {
        return json::object();
    }
    try {
        return json::parse(req.body);
    }
    catch (const json::parse_error& e) {
        throw ParseError(e.what(), 1, e.byte);
    }
}

double number_field(const json& body, const char* key)
{
    if (!body.is_object() || !body.contains(key) || !body[key].is_number()) {
        throw ParseError(std::string("field '") + key + "' must be a number", 1, 1);
    }
    return body[key].get<double>();
}

std::string string_field(const json& body, const char* key)
{
    if (!body.is_object() || !body.contains(key) || !body[key].is_string()) {
        throw ParseError(std::string("field '") + key + "' must be a string", 1, 1);
    }
    return body[key].get<std::string>();
}

std::string sse_frame(const ServiceEvent& e)
{
    return "id: " + std::to_string(e.sequence) + "\nevent: " + e.type + "\ndata: {\"session_id\":"
           + json(e.session_id).dump() + ",\"payload\":" + e.payload + "}\n\n";
}

}  // namespace

struct HttpApi::Impl {
    explicit Impl(ControlService& s) : service(s) { routes(); }

    ControlService& service;
    httplib::Server server;
    std::thread thread;
    std::atomic<bool> stopping{false};

    void stream_events(httplib::Response& res, std::string session_filter, std::uint64_t after)
    {
        auto cursor = std::make_shared<std::uint64_t>(after);
        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider(
            "text/event-stream",
            [this, cursor, session_filter](std::size_t, httplib::DataSink& sink) {
                if (stopping.load()) {
                    sink.done();
                    return false;
                }
                auto events = service.events().wait_after(*cursor, std::chrono::milliseconds(250),
                                                          session_filter);
                if (events.empty()) {
                    const std::string ping = ": ping\n\n";
                    return sink.write(ping.data(), ping.size());
                }
                for (const auto& e : events) {
                    const std::string frame = sse_frame(e);
                    if (!sink.write(frame.data(), frame.size())) {
                        return false;
                    }
                    *cursor = e.sequence;
                }
                return true;
            });
    }

    void routes()
    {
        server.Get("/personas", [this](const httplib::Request&, httplib::Response& res) {
            json out = json::array();
            for (const auto& p : service.bundle().personas) {
                out.push_back(codec::to_json(p));
            }
            send_json(res, out);
        });
        server.Get("/macros", [this](const httplib::Request&, httplib::Response& res) {
            json out = json::array();
            for (const auto& m : service.bundle().macros) {
                out.push_back(codec::to_json(m));
            }
            send_json(res, out);
        });
        server.Get("/registry", [this](const httplib::Request&, httplib::Response& res) {
            send_json(res, codec::to_json(service.bundle().registry));
        });
        server.Post("/sessions", [this](const httplib::Request&, httplib::Response& res) {
            guarded(res, [&] { send_json(res, codec::to_json(service.create_session()), 201); });
        });
        server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { send_json(res, codec::to_json(service.session(req.matches[1].str()))); });
        });
        server.Delete(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                service.close_session(req.matches[1].str());
                send_json(res, {{"closed", req.matches[1].str()}});
            });
        });
        server.Post(R"(/sessions/([^/]+)/macro)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const json body = parse_body(req);
                const auto state = service.set_macro(req.matches[1].str(), string_field(body, "macro_id"),
                                                     number_field(body, "x"));
                send_json(res, codec::to_json(state));
            });
        });
        server.Post(R"(/sessions/([^/]+)/active)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const auto sel = codec::selection_from_json(parse_body(req));
                send_json(res, codec::to_json(service.select_active(req.matches[1].str(), sel)));
            });
        });
        server.Get(R"(/sessions/([^/]+)/effective)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                send_json(res, codec::to_json(effective_persona(service.session(req.matches[1].str()))));
            });
        });
        server.Post(R"(/sessions/([^/]+)/synthesize)",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        guarded(res, [&] { synthesize(req, res); });
                    });
        server.Get(R"(/sessions/([^/]+)/curves/([^/]+))",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       guarded(res, [&] {
                           send_json(res, codec::to_json(service.curves(req.matches[1].str(),
                                                                        req.matches[2].str())));
                       });
                   });
        server.Get(R"(/sessions/([^/]+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const auto id = req.matches[1].str();
                service.session(id);
                stream_events(res, id, after_param(req));
            });
        });
        server.Get("/events", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { stream_events(res, req.get_param_value("session"), after_param(req)); });
        });
    }

    std::uint64_t after_param(const httplib::Request& req) const
    {
        std::string v = req.get_param_value("after");
        if (v.empty()) {
            v = req.get_header_value("Last-Event-ID");
        }
        if (v.empty()) {
            return service.events().last_sequence();
        }
        try {
            return std::stoull(v);
        }
        catch (const std::exception&) {
            throw DomainError("'after' must be an event sequence number");
        }
    }

    void synthesize(const httplib::Request& req, httplib::Response& res)
    {
        const json body = parse_body(req);
        const std::string text = string_field(body, "text");
        std::optional<std::uint64_t> seed;
        if (body.contains("seed") && !body["seed"].is_null()) {
            if (!body["seed"].is_number_unsigned() && !(body["seed"].is_number_integer() && body["seed"] >= 0)) {
                throw ParseError("field 'seed' must be a non-negative integer", 1, 1);
            }
            seed = body["seed"].get<std::uint64_t>();
        }
        const auto& reg = service.bundle().registry;
        const auto r = service.synthesize(req.matches[1].str(), text, seed);
        const auto wav_bytes = wav::encode(r.audio);
        const std::string wav_str(wav_bytes.begin(), wav_bytes.end());
        const json sample = codec::to_json(r.sample, reg);

        if (req.get_param_value("format") == "wav") {
            res.set_header("X-Feature-Sample", sample.dump());
            res.set_header("X-Seed", std::to_string(r.seed));
            res.set_content(wav_str, "audio/wav");
            return;
        }
        auto state = service.session(req.matches[1].str());
        send_json(res, {{"seed", r.seed},
                        {"sample", sample},
                        {"effective_persona", codec::to_json(r.effective)},
                        {"session", codec::to_json(state)},
                        {"audio",
                         {{"format", "wav"},
                          {"sample_rate", r.audio.sample_rate},
                          {"duration_seconds", r.audio.duration_seconds()},
                          {"base64", httplib::detail::base64_encode(wav_str)}}}});
    }
};

HttpApi::HttpApi(ControlService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpApi::~HttpApi()
{
    stop();
}

int HttpApi::bind(const std::string& host, int port)
{
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    }
    else if (!impl_->server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) {
        throw ConfigurationError("cannot bind " + host + ":" + std::to_string(port));
    }
    return bound;
}

void HttpApi::listen()
{
    impl_->server.listen_after_bind();
}

void HttpApi::start()
{
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void HttpApi::stop()
{
    if (!impl_) {
        return;
    }
    impl_->stopping = true;
    impl_->server.stop();
    if (impl_->thread.joinable()) {
        impl_->thread.join();
    }
}

}  // namespace vocalpersona
