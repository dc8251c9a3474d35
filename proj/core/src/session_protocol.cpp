#include "bpclip/session_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bpclip {

void SessionConfig::validate() const {
    if (n_levels < 4) {
        throw Error(errc::invalid_config, "n_levels must be >= 4");
    }
    if (static_cast<int>(pressure_targets.size()) != n_levels) {
        throw Error(errc::invalid_config, "pressure_targets must list n_levels targets");
    }
    for (std::size_t i = 0; i < pressure_targets.size(); ++i) {
        if (!(pressure_targets[i] > 0.0)) {
            throw Error(errc::invalid_config, "targets must be strictly positive");
        }
        if (i > 0 && !(pressure_targets[i] > pressure_targets[i - 1])) {
            throw Error(errc::invalid_config, "targets must be strictly increasing");
        }
    }
    if (!(dwell_seconds >= 3.0)) {
        throw Error(errc::invalid_config, "dwell_seconds must be >= 3 (pulse-window minimum)");
    }
    if (!(hold_tolerance > 0.0) || readings_per_level < 1 || max_attempts_first_level < 1 ||
        max_attempts_other < 1 || !(reach_timeout_seconds > 0.0)) {
        throw Error(errc::invalid_config, "non-positive protocol parameter");
    }
}

const char* to_string(Phase p) noexcept {
    switch (p) {
        case Phase::idle: return "idle";
        case Phase::prompting: return "prompting";
        case Phase::holding: return "holding";
        case Phase::captured: return "captured";
        case Phase::complete: return "complete";
        case Phase::aborted: return "aborted";
    }
    return "unknown";
}

const char* to_string(Prompt p) noexcept {
    switch (p) {
        case Prompt::press_harder: return "press_harder";
        case Prompt::press_softer: return "press_softer";
        case Prompt::hold_steady: return "hold_steady";
        case Prompt::release: return "release";
        case Prompt::done: return "done";
        case Prompt::abort: return "abort";
    }
    return "unknown";
}

const char* to_string(AbortReason r) noexcept {
    switch (r) {
        case AbortReason::none: return "none";
        case AbortReason::first_level_failure: return "first_level_failure";
        case AbortReason::level_failure: return "level_failure";
    }
    return "unknown";
}

bool check_fail_fast(const SessionState& state, const SessionConfig& config) {
    const int cap =
        state.level == 0 ? config.max_attempts_first_level : config.max_attempts_other;
    return state.attempts[static_cast<std::size_t>(state.level)] >= cap;
}

SessionMachine::SessionMachine(SessionConfig config) : config_(std::move(config)) {
    config_.validate();
    state_.attempts.assign(static_cast<std::size_t>(config_.n_levels), 0);
    state_.captures.assign(static_cast<std::size_t>(config_.n_levels), {});
}

bool SessionMachine::in_band(double pressure) const {
    return std::abs(pressure - target()) <= config_.hold_tolerance;
}

Prompt SessionMachine::direction_prompt(double pressure) const {
    return pressure < target() ? Prompt::press_harder : Prompt::press_softer;
}

Prompt SessionMachine::log(double t, Prompt prompt) {
    events_.push_back({t, state_.phase, state_.level, prompt});
    last_prompt_ = prompt;
    return prompt;
}

Prompt SessionMachine::current_prompt() const {
    switch (state_.phase) {
        case Phase::complete: return Prompt::done;
        case Phase::aborted: return Prompt::abort;
        default: return last_prompt_;
    }
}

Prompt SessionMachine::advance(const PressureSample& sample) {
    if (state_.terminal()) {
        throw Error(errc::session_terminated, "advance on a finished session");
    }
    if (state_.saw_sample && sample.t < state_.last_t) {
        throw Error(errc::non_monotonic_samples,
                    "t = " + std::to_string(sample.t) + " after " + std::to_string(state_.last_t));
    }
    state_.last_t = sample.t;
    state_.saw_sample = true;

    if (state_.phase == Phase::idle) {
        state_.phase = Phase::prompting;
        state_.phase_entered_t = sample.t;
    }

    switch (state_.phase) {
        case Phase::prompting:
        case Phase::captured:
            return seek_band(sample);
        case Phase::holding:
            return hold_band(sample);
        default:
            throw Error(errc::session_terminated, "unexpected phase");
    }
}

// prompting/captured: waiting for the user to settle into the target band.
Prompt SessionMachine::seek_band(const PressureSample& sample) {
    if (in_band(sample.pressure)) {
        state_.phase = Phase::holding;
        state_.hold_start_t = sample.t;
        state_.hold_window.clear();
        state_.hold_window.push_back(sample);
        return log(sample.t, Prompt::hold_steady);
    }
    if (sample.t - state_.phase_entered_t >= config_.reach_timeout_seconds) {
        return fail_attempt(sample);
    }
    return log(sample.t, direction_prompt(sample.pressure));
}

Prompt SessionMachine::hold_band(const PressureSample& sample) {
    if (!in_band(sample.pressure)) {
        return fail_attempt(sample);
    }
    state_.hold_window.push_back(sample);
    if (sample.t - state_.hold_start_t >= config_.dwell_seconds) {
        return capture_window(sample);
    }
    return log(sample.t, Prompt::hold_steady);
}

// A failed hold or an unreachable band consumes one attempt at the current
// level; the budget check decides between retry and abort.
Prompt SessionMachine::fail_attempt(const PressureSample& sample) {
    ++state_.attempts[static_cast<std::size_t>(state_.level)];
    state_.hold_window.clear();
    if (check_fail_fast(state_, config_)) {
        state_.abort_reason =
            state_.level == 0 ? AbortReason::first_level_failure : AbortReason::level_failure;
        state_.phase = Phase::aborted;
        return log(sample.t, Prompt::abort);
    }
    state_.phase = Phase::prompting;
    state_.phase_entered_t = sample.t;
    return log(sample.t, direction_prompt(sample.pressure));
}

// A completed dwell is a successful hold: the reading is recorded whatever
// its signal quality (far-from-peak levels legitimately carry almost no
// pulse). Quality decides later which levels feed the envelope. Only an
// unanalyzable window (sampling gaps) costs an attempt.
Prompt SessionMachine::capture_window(const PressureSample& sample) {
    PulseMetrics metrics;
    try {
        const FilteredSeries filtered = detrend_bandpass(state_.hold_window, config_.passband);
        double mean_pressure = 0.0;
        for (const PressureSample& s : state_.hold_window) mean_pressure += s.pressure;
        mean_pressure /= static_cast<double>(state_.hold_window.size());
        metrics = extract_pulse_metrics(filtered, mean_pressure, config_.pulse_params);
    } catch (const Error&) {
        return fail_attempt(sample);
    }
    state_.hold_window.clear();

    state_.captures[static_cast<std::size_t>(state_.level)].push_back(metrics);
    ++state_.reading_index;
    state_.phase = Phase::captured;
    state_.phase_entered_t = sample.t;

    if (state_.reading_index < config_.readings_per_level) {
        return log(sample.t, Prompt::hold_steady);
    }
    if (state_.level + 1 < config_.n_levels) {
        ++state_.level;
        state_.reading_index = 0;
        return log(sample.t, Prompt::press_harder);
    }
    state_.phase = Phase::complete;
    return log(sample.t, Prompt::release);
}

PulseMetrics reduce_captures(const std::vector<PulseMetrics>& readings) {
    if (readings.empty()) {
        throw Error(errc::not_complete, "no readings to reduce");
    }
    auto median_of = [](std::vector<double> v) {
        const std::size_t mid = v.size() / 2;
        std::nth_element(v.begin(), v.begin() + mid, v.end());
        double m = v[mid];
        if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + mid));
        return m;
    };

    std::vector<const PulseMetrics*> src;
    for (const PulseMetrics& m : readings) {
        if (m.quality == SignalQuality::good) src.push_back(&m);
    }
    const bool good = !src.empty();
    if (!good) {
        for (const PulseMetrics& m : readings) src.push_back(&m);
    }
    std::vector<double> amps, rates, pressures;
    int beats = 0;
    for (const PulseMetrics* m : src) {
        amps.push_back(m->pulse_amplitude);
        rates.push_back(m->heart_rate_bpm);
        pressures.push_back(m->mean_pressure);
        beats += m->n_beats;
    }
    PulseMetrics m;
    m.pulse_amplitude = median_of(amps);
    m.heart_rate_bpm = median_of(rates);
    m.mean_pressure = median_of(pressures);
    m.n_beats = beats;
    m.quality = good ? SignalQuality::good : SignalQuality::poor;
    return m;
}

std::vector<PulseMetrics> SessionMachine::finalize() const {
    if (state_.phase != Phase::complete) {
        throw Error(errc::not_complete, std::string("session is ") + to_string(state_.phase));
    }
    std::vector<PulseMetrics> reduced;
    reduced.reserve(state_.captures.size());
    for (const auto& level_caps : state_.captures) {
        reduced.push_back(reduce_captures(level_caps));
    }
    return reduced;
}

} // namespace bpclip
