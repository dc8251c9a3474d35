#include "bpclip/digital_twin.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bpclip {

double envelope_width_per_pulse_pressure() {
    static const double factor = (2.0 / 3.0) / std::sqrt(2.0 * std::log(1.0 / 0.55));
    return factor;
}

FixedRatios matched_ratios() {
    const double c = envelope_width_per_pulse_pressure();
    FixedRatios r;
    // SBP sits 2/3 PP above MAP, DBP 1/3 PP below; invert the Gaussian there.
    r.systolic = std::exp(-(2.0 / 3.0) * (2.0 / 3.0) / (2.0 * c * c));
    r.diastolic = std::exp(-(1.0 / 3.0) * (1.0 / 3.0) / (2.0 * c * c));
    return r;
}

void SyntheticSubject::validate() const {
    if (!(true_diastolic < true_systolic)) {
        throw Error(errc::inconsistent_config, "diastolic must be below systolic");
    }
    if (!(true_diastolic > 0.0) || !(heart_rate_bpm > 0.0) || !(envelope_sigma > 0.0)) {
        throw Error(errc::inconsistent_config, "non-positive subject parameter");
    }
    if (baseline_brightness < 0.0 || baseline_brightness > 255.0) {
        throw Error(errc::inconsistent_config, "baseline_brightness outside 0-255");
    }
    if (pulse_gain < 0.0 || noise_sd < 0.0) {
        throw Error(errc::inconsistent_config, "negative pulse_gain or noise_sd");
    }
    if (std::abs(envelope_skew) >= 0.9) {
        throw Error(errc::inconsistent_config, "envelope_skew must stay in (-0.9, 0.9)");
    }
}

SyntheticSubject make_subject(double systolic, double diastolic, double heart_rate_bpm) {
    SyntheticSubject s;
    s.true_systolic = systolic;
    s.true_diastolic = diastolic;
    s.heart_rate_bpm = heart_rate_bpm;
    s.envelope_sigma = envelope_width_per_pulse_pressure() * (systolic - diastolic);
    s.validate();
    return s;
}

double envelope_model(double pressure, const SyntheticSubject& subject) {
    const double d = pressure - subject.map();
    double sigma = subject.envelope_sigma;
    if (subject.envelope_skew != 0.0) {
        sigma *= d >= 0.0 ? 1.0 + subject.envelope_skew : 1.0 - subject.envelope_skew;
    }
    return subject.pulse_gain * std::exp(-d * d / (2.0 * sigma * sigma));
}

double pulse_wave(double phase) {
    double ph = phase - std::floor(phase);
    constexpr double rise = 0.3;
    constexpr double pi = 3.14159265358979323846;
    if (ph < rise) {
        return -0.5 * std::cos(pi * ph / rise);
    }
    return 0.5 * std::cos(pi * (ph - rise) / (1.0 - rise));
}

std::uint64_t TwinRng::next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double TwinRng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double TwinRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double TwinRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
}

namespace {

constexpr double kFrameBackground = 10.0;

double clamp255(double v) { return std::clamp(v, 0.0, 255.0); }

// Static half-LSB dither, a pure hash of the pixel position. Stands in for
// sensor noise: averaging the disc interior then resolves brightness well
// below one intensity step, which is what fingertip PPG on an 8-bit camera
// relies on.
double pixel_dither(int x, int y) {
    std::uint32_t h = static_cast<std::uint32_t>(x) * 0x9E3779B1u ^
                      static_cast<std::uint32_t>(y) * 0x85EBCA77u;
    h ^= h >> 16;
    h *= 0x7FEB352Du;
    h ^= h >> 15;
    h *= 0x846CA68Bu;
    h ^= h >> 16;
    return static_cast<double>(h >> 8) * 0x1.0p-24 - 0.5;
}

} // namespace

Frame render_frame(double z_mm, double brightness, const DeviceProfile& profile, int width,
                   int height, double center_x, double center_y) {
    if (!(z_mm > 0.0) || z_mm > profile.rest_distance_z0 * (1.0 + kRestToleranceFraction)) {
        throw Error(errc::non_physical_distance, "z outside (0, z0]");
    }
    const double radius = 0.5 * distance_to_projection(z_mm, profile);
    if (center_x - radius < 1.5 || center_y - radius < 1.5 || center_x + radius > width - 2.5 ||
        center_y + radius > height - 2.5) {
        throw Error(errc::disc_exceeds_frame,
                    "disc of radius " + std::to_string(radius) + " px does not fit");
    }

    Frame f;
    f.width = width;
    f.height = height;
    f.pixels.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                    static_cast<std::uint8_t>(kFrameBackground));

    const double level = clamp255(brightness);
    const int x_lo = std::max(0, static_cast<int>(std::floor(center_x - radius - 2.0)));
    const int x_hi = std::min(width - 1, static_cast<int>(std::ceil(center_x + radius + 2.0)));
    const int y_lo = std::max(0, static_cast<int>(std::floor(center_y - radius - 2.0)));
    const int y_hi = std::min(height - 1, static_cast<int>(std::ceil(center_y + radius + 2.0)));
    for (int y = y_lo; y <= y_hi; ++y) {
        for (int x = x_lo; x <= x_hi; ++x) {
            const double dx = x - center_x;
            const double dy = y - center_y;
            const double dist = std::sqrt(dx * dx + dy * dy);
            // 1-px linear soft edge centred on the geometric radius
            const double coverage = std::clamp(radius - dist + 0.5, 0.0, 1.0);
            if (coverage > 0.0) {
                const double v =
                    kFrameBackground + (level - kFrameBackground) * coverage + pixel_dither(x, y);
                f.pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                         static_cast<std::size_t>(x)] =
                    static_cast<std::uint8_t>(std::lround(clamp255(v)));
            }
        }
    }
    return f;
}

Frame render_frame(double z_mm, double brightness, const DeviceProfile& profile, int width,
                   int height) {
    return render_frame(z_mm, brightness, profile, width, height, 0.5 * width, 0.5 * height);
}

SyntheticSession simulate_session(const SyntheticSubject& subject, const DeviceProfile& profile,
                                  const SessionConfig& config, const SimulationOptions& options,
                                  std::uint64_t seed) {
    subject.validate();
    profile.validate();
    config.validate();
    if (!(options.fs >= 15.0) || !(options.ramp_rate_mmhg_s > 0.0)) {
        throw Error(errc::inconsistent_config, "fs must be >= 15 Hz and ramp rate positive");
    }
    // The top target must stay inside the spring's travel for this profile.
    const double top_target = config.pressure_targets.back();
    pressure_to_distance(top_target + config.hold_tolerance, profile);

    SyntheticSession session;
    session.subject = subject;
    session.profile = profile;
    session.config = config;
    session.options = options;
    session.seed = seed;

    TwinRng rng(seed);
    const double dt = 1.0 / options.fs;
    const double hold_seconds =
        config.readings_per_level * (config.dwell_seconds + dt) + options.hold_margin_seconds;
    const double jitter_cap = 0.8 * config.hold_tolerance;
    // AR(1) wobble with a ~1.5 s correlation time, clamped inside the band.
    const double rho = std::exp(-dt / 1.5);
    const double innovation = options.pressure_jitter_sd * std::sqrt(1.0 - rho * rho);

    std::vector<double> trace;
    double pressure = 0.0;
    auto dwell_at = [&](double level_pressure, double seconds, double jitter_sd) {
        double wobble = 0.0;
        const int steps = static_cast<int>(std::ceil(seconds / dt));
        for (int i = 0; i < steps; ++i) {
            if (jitter_sd > 0.0) {
                wobble = rho * wobble + innovation * rng.normal();
                wobble = std::clamp(wobble, -jitter_cap, jitter_cap);
            }
            pressure = level_pressure + wobble;
            trace.push_back(pressure);
        }
        pressure = level_pressure;
    };
    auto ramp_to = [&](double to) {
        const double from = pressure;
        const double seconds = std::abs(to - from) / options.ramp_rate_mmhg_s;
        const int steps = static_cast<int>(std::ceil(seconds / dt));
        for (int i = 1; i <= steps; ++i) {
            trace.push_back(from + (to - from) * static_cast<double>(i) / steps);
        }
        pressure = to;
    };

    dwell_at(0.0, options.settle_seconds, 0.0);
    const int last_level = options.fail_at_level >= 0
                               ? std::min(options.fail_at_level, config.n_levels)
                               : config.n_levels;
    for (int level = 0; level < last_level; ++level) {
        ramp_to(config.pressure_targets[static_cast<std::size_t>(level)]);
        dwell_at(pressure, hold_seconds, options.pressure_jitter_sd);
    }
    if (options.fail_at_level >= 0 && options.fail_at_level < config.n_levels) {
        // Stall just below the band until the attempt budget runs out, then give up.
        const double target = config.pressure_targets[static_cast<std::size_t>(options.fail_at_level)];
        const double shy = target - 2.5 * config.hold_tolerance;
        const int cap = options.fail_at_level == 0 ? config.max_attempts_first_level
                                                   : config.max_attempts_other;
        ramp_to(std::max(shy, 0.0));
        dwell_at(pressure, cap * config.reach_timeout_seconds + 2.0, options.pressure_jitter_sd);
        ramp_to(0.0);
    }

    // Brightness synthesis. The guide's light budget scales the pulsatile
    // signal (exposure normalizes the DC level), so attenuation degrades SNR
    // without moving the baseline.
    const double attenuation = light_transmission(profile);
    session.samples.reserve(trace.size());
    double phase = 0.0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        PressureSample s;
        s.t = static_cast<double>(i) * dt;
        s.pressure = trace[i];
        phase += subject.heart_rate_bpm / 60.0 * dt;
        double b = subject.baseline_brightness +
                   attenuation * envelope_model(s.pressure, subject) * pulse_wave(phase);
        if (subject.noise_sd > 0.0) b += subject.noise_sd * rng.normal();
        s.brightness = clamp255(b);
        s.diameter_px = distance_to_projection(pressure_to_distance(s.pressure, profile), profile);
        session.samples.push_back(s);
    }

    if (options.render_frames) {
        // Fixed sub-pixel disc offset per session keeps detection honest.
        const double cx = 0.5 * options.frame_width + rng.uniform(-0.5, 0.5);
        const double cy = 0.5 * options.frame_height + rng.uniform(-0.5, 0.5);
        session.frames.reserve(session.samples.size());
        for (const PressureSample& s : session.samples) {
            const double z = pressure_to_distance(s.pressure, profile);
            Frame f = render_frame(z, s.brightness, profile, options.frame_width,
                                   options.frame_height, cx, cy);
            f.timestamp = s.t;
            session.frames.push_back(std::move(f));
        }
    }
    return session;
}

std::vector<SyntheticSubject> make_cohort(int n, std::uint64_t seed, const CohortRanges& ranges) {
    TwinRng rng(seed);
    std::vector<SyntheticSubject> cohort;
    cohort.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double sbp = 0.0, dbp = 0.0;
        do {
            sbp = rng.uniform(ranges.systolic_low, ranges.systolic_high);
            dbp = rng.uniform(ranges.diastolic_low, ranges.diastolic_high);
        } while (sbp - dbp < ranges.min_pulse_pressure);
        SyntheticSubject s = make_subject(sbp, dbp, rng.uniform(ranges.heart_rate_low, ranges.heart_rate_high));
        s.baseline_brightness = rng.uniform(ranges.baseline_low, ranges.baseline_high);
        s.pulse_gain = rng.uniform(ranges.pulse_gain_low, ranges.pulse_gain_high);
        s.noise_sd = ranges.noise_sd;
        s.envelope_skew = ranges.envelope_skew;
        cohort.push_back(s);
    }
    return cohort;
}

} // namespace bpclip
