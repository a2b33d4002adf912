#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vocalpersona/persona_store.hpp"
#include "vocalpersona/render_backend.hpp"
#include "vocalpersona/sampler.hpp"

namespace vocalpersona {

struct BlendSelection {
    std::string persona_a;
    std::string persona_b;
    double alpha = 0.0;

    bool operator==(const BlendSelection&) const = default;
};

/// A single persona id, or a point on the segment between two personas.
using ActiveSelection = std::variant<std::string, BlendSelection>;

/// Live control state of one user. Values, not handles: every transition
/// returns a new state and leaves its input untouched.
struct SessionState {
    std::string session_id;
    std::shared_ptr<const PersonaBundle> bundle;
    ActiveSelection active;
    std::map<std::string, double> macro_values;  // absent means 0
    std::uint64_t seed_counter = 0;
};

/// Fresh session on the bundle's first persona with every macro at 0.
/// Throws DomainError when the bundle has no personas, ValidationError when
/// it does not validate.
SessionState create_session(std::shared_ptr<const PersonaBundle> bundle);

/// Throws UnknownMacroError, DomainError (x outside [0, 100]).
SessionState set_macro(const SessionState& s, std::string_view macro_id, double x);

/// Macro values carry over to the new selection. Throws UnknownPersonaError,
/// DomainError (alpha outside [0, 1]).
SessionState select_active(const SessionState& s, const ActiveSelection& selection);

/// The selected persona, or the blend it describes, before macros.
Persona base_persona(const SessionState& s);

/// The session's macro values as a MacroSet (sorted by macro id).
MacroSet macro_set(const SessionState& s);

/// apply_macros(base_persona(s), ...). Always derived from the unmodified
/// base persona, so repeated calls never accumulate.
Persona effective_persona(const SessionState& s);

struct SynthesisResult {
    AudioBuffer audio;
    FeatureSample sample;
    Persona effective;
    std::uint64_t seed = 0;
    SessionState state;  // seed_counter advanced by one
};

/// Base -> macros -> sample_features -> render. The seed is `seed_override`
/// when given, otherwise derive_seed(session_id, seed_counter). The same
/// seed drives the renderer's noise source.
SynthesisResult synthesize(const SessionState& s, std::string_view text,
                           std::optional<std::uint64_t> seed_override = std::nullopt,
                           const RenderBackend* backend = nullptr);

inline constexpr std::size_t curve_points = 256;

struct CurvePair {
    std::string feature_id;
    std::vector<double> x;
    std::vector<double> pre;   // base persona
    std::vector<double> post;  // after macros
};

/// Densities on a 256-point grid over the base persona's [lo, hi] for
/// `feature_id`, each rescaled so its trapezoid integral is 1.
/// Throws UnknownFeatureError.
CurvePair get_curves(const SessionState& s, std::string_view feature_id);

/// Broadcast record of a state change.
struct ServiceEvent {
    std::uint64_t sequence = 0;
    std::string session_id;
    std::string type;     // session_created, macro_changed, active_changed, synthesized, session_closed
    std::string payload;  // JSON text
};

/// Bounded in-memory event log with blocking reads, the backing store for
/// the HTTP push channel.
class EventHub {
  public:
    explicit EventHub(std::size_t capacity = 1024) : capacity_(capacity) {}

    std::uint64_t publish(std::string session_id, std::string type, std::string payload);

    /// Events with sequence > `after`, optionally for one session. Blocks up
    /// to `timeout` when none are available yet.
    std::vector<ServiceEvent> wait_after(std::uint64_t after, std::chrono::milliseconds timeout,
                                         std::string_view session_id = {}) const;

    std::uint64_t last_sequence() const;

    /// Wakes all waiters; subsequent waits return immediately.
    void shutdown();

  private:
    std::vector<ServiceEvent> collect(std::uint64_t after, std::string_view session_id) const;

    mutable std::mutex mutex_;
    mutable std::condition_variable cv_;
    std::deque<ServiceEvent> events_;
    std::uint64_t next_ = 1;
    std::size_t capacity_;
    bool closed_ = false;
};

/// Thread-safe owner of many sessions over one bundle. Mutations within a
/// session are serialized; synthesis renders from a snapshot taken under the
/// session lock, so a concurrent set_macro only affects later syntheses.
class ControlService {
  public:
    explicit ControlService(PersonaBundle bundle, std::shared_ptr<const RenderBackend> backend = nullptr);

    const PersonaBundle& bundle() const noexcept { return *bundle_; }

    SessionState create_session();
    SessionState session(std::string_view id) const;
    std::vector<std::string> session_ids() const;
    void close_session(std::string_view id);

    SessionState set_macro(std::string_view id, std::string_view macro_id, double x);
    SessionState select_active(std::string_view id, const ActiveSelection& selection);
    SynthesisResult synthesize(std::string_view id, std::string_view text,
                               std::optional<std::uint64_t> seed_override = std::nullopt);
    CurvePair curves(std::string_view id, std::string_view feature_id) const;

    EventHub& events() noexcept { return events_; }
    const EventHub& events() const noexcept { return events_; }

  private:
    struct Entry {
        std::mutex mutex;
        SessionState state;
    };

    std::shared_ptr<Entry> find(std::string_view id) const;

    std::shared_ptr<const PersonaBundle> bundle_;
    std::shared_ptr<const RenderBackend> backend_;
    mutable std::shared_mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Entry>, std::less<>> sessions_;
    EventHub events_;
};

}  // namespace vocalpersona
