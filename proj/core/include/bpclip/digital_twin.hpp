#pragma once

#include <cstdint>
#include <vector>

#include "bpclip/frame_analysis.hpp"
#include "bpclip/oscillometry.hpp"
#include "bpclip/session_protocol.hpp"

namespace bpclip {

/// Envelope width per unit pulse pressure in the synthetic physiology.
/// Chosen so the conventional 0.55 systolic ratio inverts the synthetic
/// envelope exactly: sigma = (2/3) * PP / sqrt(2 ln(1/0.55)).
double envelope_width_per_pulse_pressure();

/// Ratio pair that decodes the synthetic envelope exactly, derived from the
/// same half-width identity as the width convention above.
FixedRatios matched_ratios();

/// Ground-truth physiology for one synthetic measurement.
struct SyntheticSubject {
    double true_systolic = 120.0;
    double true_diastolic = 80.0;
    double heart_rate_bpm = 70.0;
    double envelope_sigma = 24.4;      ///< mmHg
    double baseline_brightness = 170.0;
    double pulse_gain = 12.0;          ///< brightness units at the envelope peak
    double noise_sd = 0.0;             ///< additive brightness noise
    double envelope_skew = 0.0;        ///< 0 symmetric; +/- widens one side

    double map() const { return true_diastolic + (true_systolic - true_diastolic) / 3.0; }
    void validate() const;
};

/// Subject with the envelope width tied to pulse pressure by the project
/// convention; the usual way to build one.
SyntheticSubject make_subject(double systolic, double diastolic, double heart_rate_bpm);

/// Pulse amplitude at applied pressure P: peak pulse_gain at P = MAP,
/// Gaussian falloff of width envelope_sigma (per-side widths split by
/// envelope_skew when nonzero).
double envelope_model(double pressure, const SyntheticSubject& subject);

/// Unit peak-to-trough beat template: fast systolic rise over the first
/// 30% of the cycle, slow decay over the rest. Zero-mean, range [-0.5, 0.5].
double pulse_wave(double phase);

/// Deterministic generator (splitmix64 + Box-Muller); identical seeds give
/// identical streams on every platform.
class TwinRng {
public:
    explicit TwinRng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next_u64();
    double uniform();                       ///< [0, 1)
    double uniform(double lo, double hi);
    double normal();                        ///< standard normal

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

struct SimulationOptions {
    double fs = 30.0;                 ///< sample/frame rate
    double ramp_rate_mmhg_s = 40.0;   ///< pressing speed between levels
    double pressure_jitter_sd = 0.0;  ///< in-band hold wobble, mmHg
    double settle_seconds = 0.5;      ///< rest time before the first ramp
    double hold_margin_seconds = 1.0; ///< extra hold beyond the required dwell
    int fail_at_level = -1;           ///< >= 0: stall below this level's band, then give up
    bool render_frames = false;
    int frame_width = 192;
    int frame_height = 192;
};

struct SyntheticSession {
    SyntheticSubject subject;
    DeviceProfile profile;
    SessionConfig config;
    SimulationOptions options;
    std::uint64_t seed = 0;
    std::vector<PressureSample> samples; ///< ground-truth stream
    std::vector<Frame> frames;           ///< present when options.render_frames
};

/// Synthesizes a full guided session: protocol-shaped pressure trace with
/// human-like ramps and in-band jitter, envelope-modulated pulse brightness,
/// optional rendered frames. Bit-identical for identical seeds.
SyntheticSession simulate_session(const SyntheticSubject& subject, const DeviceProfile& profile,
                                  const SessionConfig& config, const SimulationOptions& options,
                                  std::uint64_t seed);

/// Renders the anti-aliased projection disc seen at pinhole distance z:
/// interior at `brightness`, background 10, one-pixel soft edge.
Frame render_frame(double z_mm, double brightness, const DeviceProfile& profile, int width,
                   int height, double center_x, double center_y);

/// Centered-disc convenience overload.
Frame render_frame(double z_mm, double brightness, const DeviceProfile& profile, int width,
                   int height);

struct CohortRanges {
    double systolic_low = 88.0, systolic_high = 157.0;
    double diastolic_low = 57.0, diastolic_high = 97.0;
    double min_pulse_pressure = 20.0;
    double heart_rate_low = 55.0, heart_rate_high = 90.0;
    double baseline_low = 150.0, baseline_high = 190.0;
    double pulse_gain_low = 14.0, pulse_gain_high = 24.0;
    double noise_sd = 0.0;
    double envelope_skew = 0.0;
};

/// Random subjects spanning the validated blood-pressure band. Deterministic
/// per seed.
std::vector<SyntheticSubject> make_cohort(int n, std::uint64_t seed, const CohortRanges& ranges = {});

} // namespace bpclip
