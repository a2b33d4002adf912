#pragma once

#include <memory>
#include <string>

#include "vocalpersona/control_service.hpp"

namespace vocalpersona {

/// HTTP front end for a ControlService.
///
///   GET    /personas                          persona list (bundle JSON shape)
///   GET    /macros                            macro library
///   GET    /registry                          feature registry
///   POST   /sessions                          new session -> state
///   GET    /sessions/{id}                     state
///   DELETE /sessions/{id}
///   POST   /sessions/{id}/macro               {"macro_id", "x"} -> state
///   POST   /sessions/{id}/active              {"persona_id"} | {"a","b","alpha"} -> state
///   GET    /sessions/{id}/effective           effective persona
///   POST   /sessions/{id}/synthesize          {"text", "seed"?} -> {audio (base64 WAV),
///                                             sample, effective_persona, seed, session}
///                                             ?format=wav returns the raw WAV instead,
///                                             with the sample in X-Feature-Sample
///   GET    /sessions/{id}/curves/{feature}    {"feature_id","x","pre","post"}
///   GET    /sessions/{id}/events              server-sent events for one session
///   GET    /events                            server-sent events for all sessions
///
/// Errors are {"error": {"kind", "message", "violations"?}} with 400 for
/// malformed or out-of-domain input, 404 for unknown ids, 422 for validation
/// failures.
class HttpApi {
  public:
    explicit HttpApi(ControlService& service);
    ~HttpApi();

    HttpApi(const HttpApi&) = delete;
    HttpApi& operator=(const HttpApi&) = delete;

    /// Binds to host:port (port 0 picks a free port) and returns the bound
    /// port. Throws ConfigurationError.
    int bind(const std::string& host, int port);

    /// Serves on the calling thread until stop().
    void listen();

    /// Serves on a background thread.
    void start();

    void stop();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace vocalpersona
