#pragma once

#include <vector>

#include "bpclip/ppg_signal.hpp"

namespace bpclip {

/// Guided-measurement configuration. Targets are presented to the user in
/// strictly increasing order; the first (lowest) level is the hardest to
/// hold, so it gets the tighter attempt budget and the session fails fast
/// there instead of after a full sweep.
struct SessionConfig {
    int n_levels = 6;
    std::vector<double> pressure_targets = {40.0, 70.0, 100.0, 130.0, 160.0, 190.0};
    double hold_tolerance = 8.0;        ///< +/- mmHg band around each target
    double dwell_seconds = 5.0;         ///< required continuous in-band time
    int readings_per_level = 2;
    int max_attempts_first_level = 2;
    int max_attempts_other = 3;
    double reach_timeout_seconds = 10.0; ///< time allowed to enter the band per attempt
    Passband passband{};
    PulseExtractionParams pulse_params{};

    void validate() const; ///< throws errc::invalid_config
};

enum class Phase { idle, prompting, holding, captured, complete, aborted };
enum class Prompt { press_harder, press_softer, hold_steady, release, done, abort };
enum class AbortReason { none, first_level_failure, level_failure };

const char* to_string(Phase p) noexcept;
const char* to_string(Prompt p) noexcept;
const char* to_string(AbortReason r) noexcept;

struct SessionEvent {
    double t = 0.0;
    Phase phase = Phase::idle;
    int level = 0;
    Prompt prompt = Prompt::press_harder;
};

struct SessionState {
    Phase phase = Phase::idle;
    int level = 0;
    int reading_index = 0;             ///< captures completed at the current level
    std::vector<int> attempts;         ///< failed attempts per level
    double phase_entered_t = 0.0;
    double hold_start_t = 0.0;
    double last_t = 0.0;
    bool saw_sample = false;
    AbortReason abort_reason = AbortReason::none;
    std::vector<std::vector<PulseMetrics>> captures; ///< per level
    std::vector<PressureSample> hold_window;

    bool terminal() const { return phase == Phase::complete || phase == Phase::aborted; }
};

/// True when the current level's failed-hold count has exhausted its attempt
/// budget (the first level's budget is the strict one).
bool check_fail_fast(const SessionState& state, const SessionConfig& config);

/// Median reduction of one level's readings. Good readings win; a level with
/// none comes back flagged poor so the oscillogram can skip it.
PulseMetrics reduce_captures(const std::vector<PulseMetrics>& readings);

/// Deterministic state machine over a pressure-sample stream. Feed samples in
/// time order; each advance returns the directive to surface to the user.
/// Prompts are data; rendering is the caller's business.
class SessionMachine {
public:
    explicit SessionMachine(SessionConfig config);

    /// Throws errc::session_terminated once the machine is complete/aborted
    /// and errc::non_monotonic_samples when time runs backwards.
    Prompt advance(const PressureSample& sample);

    const SessionState& state() const { return state_; }
    const SessionConfig& config() const { return config_; }
    const std::vector<SessionEvent>& events() const { return events_; }

    /// The prompt a UI should currently display.
    Prompt current_prompt() const;

    /// Per-level reduction of the captured readings (median amplitude and
    /// rate), ordered by target pressure. Only valid on a complete session.
    std::vector<PulseMetrics> finalize() const;

private:
    Prompt seek_band(const PressureSample& sample);
    Prompt hold_band(const PressureSample& sample);
    Prompt fail_attempt(const PressureSample& sample);
    Prompt capture_window(const PressureSample& sample);
    Prompt direction_prompt(double pressure) const;
    double target() const { return config_.pressure_targets[static_cast<std::size_t>(state_.level)]; }
    bool in_band(double pressure) const;
    Prompt log(double t, Prompt prompt);

    SessionConfig config_;
    SessionState state_;
    std::vector<SessionEvent> events_;
    Prompt last_prompt_ = Prompt::press_harder;
};

} // namespace bpclip
