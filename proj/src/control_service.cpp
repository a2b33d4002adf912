#include "vocalpersona/control_service.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <random>

#include "vocalpersona/counter_rng.hpp"
#include "vocalpersona/json_codec.hpp"

namespace vocalpersona {

namespace {

std::string new_session_id()
{
    static const std::uint64_t nonce = [] {
        std::random_device rd;
        return (std::uint64_t{rd()} << 32) ^ rd();
    }();
    static std::atomic<std::uint64_t> counter{0};
    char buf[24];
    std::snprintf(buf, sizeof buf, "s-%016llx",
                  static_cast<unsigned long long>(mix64(nonce ^ mix64(counter.fetch_add(1)))));
    return buf;
}

const std::string& selection_persona(const ActiveSelection& sel)
{
    return std::get<std::string>(sel);
}

}  // namespace

SessionState create_session(std::shared_ptr<const PersonaBundle> bundle)
{
    if (!bundle) {
        throw DomainError("session needs a bundle");
    }
    if (bundle->personas.empty()) {
        throw DomainError("bundle contains no personas");
    }
    if (auto report = validate_bundle(*bundle); !report.empty()) {
        throw ValidationError(std::move(report));
    }
    SessionState s;
    s.session_id = new_session_id();
    s.active = bundle->personas.front().id;
    s.bundle = std::move(bundle);
    return s;
}

SessionState set_macro(const SessionState& s, std::string_view macro_id, double x)
{
    find_macro(s.bundle->macros, macro_id);
    if (!(x >= macro_min_value && x <= macro_max_value)) {
        throw DomainError("macro value must lie in [0, 100]");
    }
    SessionState out = s;
    out.macro_values[std::string(macro_id)] = x;
    return out;
}

SessionState select_active(const SessionState& s, const ActiveSelection& selection)
{
    if (const auto* blend = std::get_if<BlendSelection>(&selection)) {
        s.bundle->persona(blend->persona_a);
        s.bundle->persona(blend->persona_b);
        if (!(blend->alpha >= 0.0 && blend->alpha <= 1.0)) {
            throw DomainError("blend alpha must lie in [0, 1]");
        }
    }
    else {
        s.bundle->persona(selection_persona(selection));
    }
    SessionState out = s;
    out.active = selection;
    return out;
}

Persona base_persona(const SessionState& s)
{
    if (const auto* blend = std::get_if<BlendSelection>(&s.active)) {
        return blend_personas(s.bundle->persona(blend->persona_a), s.bundle->persona(blend->persona_b),
                              blend->alpha);
    }
    return s.bundle->persona(selection_persona(s.active));
}

MacroSet macro_set(const SessionState& s)
{
    MacroSet set;
    set.reserve(s.macro_values.size());
    for (const auto& [id, x] : s.macro_values) {
        set.push_back({id, x});
    }
    return set;
}

Persona effective_persona(const SessionState& s)
{
    return apply_macros(base_persona(s), s.bundle->macros, macro_set(s), s.bundle->registry);
}

SynthesisResult synthesize(const SessionState& s, std::string_view text,
                           std::optional<std::uint64_t> seed_override, const RenderBackend* backend)
{
    if (text.empty()) {
        throw DomainError("text must be non-empty");
    }
    SynthesisResult r;
    r.seed = seed_override.value_or(derive_seed(s.session_id, s.seed_counter));
    r.effective = effective_persona(s);
    r.sample = sample_features(r.effective, r.seed);

    RenderRequest req{std::string(text), r.sample, default_sample_rate, r.seed};
    if (backend) {
        r.audio = backend->render(req);
    }
    else {
        r.audio = SourceFilterBackend(s.bundle->registry).render(req);
    }
    r.state = s;
    ++r.state.seed_counter;
    return r;
}

namespace {

std::vector<double> normalized_density(const FeaturePDF& pdf, const std::vector<double>& x)
{
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = pdf.density(x[i]);
    }
    const double step = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        area += 0.5 * (y[i] + y[i + 1]) * step;
    }
    if (area > 0) {
        for (auto& v : y) {
            v /= area;
        }
        return y;
    }
    // Too narrow for the grid: show a spike at the most probable grid point.
    std::size_t best = 0;
    double best_mass = -1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = pdf.cdf(x[i] + 0.5 * step) - pdf.cdf(x[i] - 0.5 * step);
        if (a > best_mass) {
            best_mass = a;
            best = i;
        }
    }
    std::fill(y.begin(), y.end(), 0.0);
    const bool edge = best == 0 || best + 1 == x.size();
    y[best] = (edge ? 2.0 : 1.0) / step;
    return y;
}

}  // namespace

CurvePair get_curves(const SessionState& s, std::string_view feature_id)
{
    const auto idx = s.bundle->registry.index_of(feature_id);
    if (!idx) {
        throw UnknownFeatureError(std::string(feature_id));
    }
    const Persona base = base_persona(s);
    const Persona post = apply_macros(base, s.bundle->macros, macro_set(s), s.bundle->registry);
    const FeaturePDF& pre_pdf = base.pdfs[*idx];

    CurvePair out;
    out.feature_id = std::string(feature_id);
    out.x.resize(curve_points);
    const double step = (pre_pdf.hi - pre_pdf.lo) / static_cast<double>(curve_points - 1);
    for (std::size_t i = 0; i < curve_points; ++i) {
        out.x[i] = i + 1 == curve_points ? pre_pdf.hi : pre_pdf.lo + step * static_cast<double>(i);
    }
    out.pre = normalized_density(pre_pdf, out.x);
    out.post = normalized_density(post.pdfs[*idx], out.x);
    return out;
}

std::uint64_t EventHub::publish(std::string session_id, std::string type, std::string payload)
{
    std::uint64_t seq;
    {
        std::lock_guard lock(mutex_);
        seq = next_++;
        events_.push_back({seq, std::move(session_id), std::move(type), std::move(payload)});
        while (events_.size() > capacity_) {
            events_.pop_front();
        }
    }
    cv_.notify_all();
    return seq;
}

std::vector<ServiceEvent> EventHub::collect(std::uint64_t after, std::string_view session_id) const
{
    std::vector<ServiceEvent> out;
    for (const auto& e : events_) {
        if (e.sequence > after && (session_id.empty() || e.session_id == session_id)) {
            out.push_back(e);
        }
    }
    return out;
}

std::vector<ServiceEvent> EventHub::wait_after(std::uint64_t after, std::chrono::milliseconds timeout,
                                               std::string_view session_id) const
{
    std::unique_lock lock(mutex_);
    std::vector<ServiceEvent> out;
    cv_.wait_for(lock, timeout, [&] {
        out = collect(after, session_id);
        return closed_ || !out.empty();
    });
    return out;
}

std::uint64_t EventHub::last_sequence() const
{
    std::lock_guard lock(mutex_);
    return next_ - 1;
}

void EventHub::shutdown()
{
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
    }
    cv_.notify_all();
}

ControlService::ControlService(PersonaBundle bundle, std::shared_ptr<const RenderBackend> backend)
    : bundle_(std::make_shared<const PersonaBundle>(std::move(bundle))), backend_(std::move(backend))
{
    if (auto report = validate_bundle(*bundle_); !report.empty()) {
        throw ValidationError(std::move(report));
    }
    if (!backend_) {
        backend_ = std::make_shared<const SourceFilterBackend>(bundle_->registry);
    }
}

std::shared_ptr<ControlService::Entry> ControlService::find(std::string_view id) const
{
    std::shared_lock lock(sessions_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) {
        throw UnknownSessionError(std::string(id));
    }
    return it->second;
}

SessionState ControlService::create_session()
{
    auto entry = std::make_shared<Entry>();
    entry->state = vocalpersona::create_session(bundle_);
    SessionState snapshot = entry->state;
    {
        std::unique_lock lock(sessions_mutex_);
        sessions_.emplace(snapshot.session_id, entry);
    }
    events_.publish(snapshot.session_id, "session_created", codec::to_json(snapshot).dump());
    return snapshot;
}

SessionState ControlService::session(std::string_view id) const
{
    auto entry = find(id);
    std::lock_guard lock(entry->mutex);
    return entry->state;
}

std::vector<std::string> ControlService::session_ids() const
{
    std::shared_lock lock(sessions_mutex_);
    std::vector<std::string> out;
    for (const auto& [id, _] : sessions_) {
        out.push_back(id);
    }
    return out;
}

void ControlService::close_session(std::string_view id)
{
    {
        std::unique_lock lock(sessions_mutex_);
        auto it = sessions_.find(id);
        if (it == sessions_.end()) {
            throw UnknownSessionError(std::string(id));
        }
        sessions_.erase(it);
    }
    events_.publish(std::string(id), "session_closed", "{}");
}

SessionState ControlService::set_macro(std::string_view id, std::string_view macro_id, double x)
{
    auto entry = find(id);
    SessionState next;
    {
        std::lock_guard lock(entry->mutex);
        next = vocalpersona::set_macro(entry->state, macro_id, x);
        entry->state = next;
    }
    events_.publish(next.session_id, "macro_changed", codec::to_json(next).dump());
    return next;
}

SessionState ControlService::select_active(std::string_view id, const ActiveSelection& selection)
{
    auto entry = find(id);
    SessionState next;
    {
        std::lock_guard lock(entry->mutex);
        next = vocalpersona::select_active(entry->state, selection);
        entry->state = next;
    }
    events_.publish(next.session_id, "active_changed", codec::to_json(next).dump());
    return next;
}

SynthesisResult ControlService::synthesize(std::string_view id, std::string_view text,
                                           std::optional<std::uint64_t> seed_override)
{
    if (text.empty()) {
        throw DomainError("text must be non-empty");
    }
    auto entry = find(id);
    SessionState snapshot;
    {
        std::lock_guard lock(entry->mutex);
        snapshot = entry->state;
        // Fail before reserving a seed so errors leave the session untouched.
        effective_persona(snapshot);
        ++entry->state.seed_counter;
    }
    SynthesisResult r = vocalpersona::synthesize(snapshot, text, seed_override, backend_.get());
    codec::json event = {{"seed", r.seed}, {"sample", codec::to_json(r.sample, bundle_->registry)}};
    events_.publish(snapshot.session_id, "synthesized", event.dump());
    return r;
}

CurvePair ControlService::curves(std::string_view id, std::string_view feature_id) const
{
    return get_curves(session(id), feature_id);
}

}  // namespace vocalpersona
