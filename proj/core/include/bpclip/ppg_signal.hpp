#pragma once

#include <vector>

#include "bpclip/device_model.hpp"

namespace bpclip {

struct Passband {
    double low_hz = 0.5;
    double high_hz = 10.0;
};

/// Uniformly resampled, conditioned brightness series.
struct FilteredSeries {
    double t0 = 0.0;
    double fs = 0.0; ///< effective sampling rate, Hz
    std::vector<double> values;
};

enum class SignalQuality { good, poor };

const char* to_string(SignalQuality q) noexcept;

/// Pulse summary of one hold window at one force level.
struct PulseMetrics {
    double pulse_amplitude = 0.0; ///< median peak-to-trough, brightness units
    double heart_rate_bpm = 0.0;
    int n_beats = 0;
    SignalQuality quality = SignalQuality::poor;
    double mean_pressure = 0.0; ///< mmHg over the window
};

/// Removes baseline and out-of-band content from the brightness channel.
/// Zero-phase (forward-backward) 2nd-order Butterworth high- and low-pass
/// cascade, so beat timing is unshifted; output is exactly zero-mean.
/// Requires >= 3 s of samples at an effective rate >= 15 Hz. At low rates
/// the upper corner is pulled in to 0.45*fs to stay below Nyquist.
FilteredSeries detrend_bandpass(const std::vector<PressureSample>& window, Passband band = {});

struct PulseExtractionParams {
    double min_beat_spacing_s = 0.25; ///< 60/240 s; no two beats closer than this
    double prominence_fraction = 0.25;
    /// The prominence floor is also at least this many robust noise scales
    /// (from median absolute successive differences), so broadband noise
    /// bumps between beats do not register at low SNR.
    double noise_floor_multiple = 4.0;
    int min_beats = 3;
    double max_ibi_cv = 0.25;
    double min_heart_rate_bpm = 20.0;
    double max_heart_rate_bpm = 240.0;
};

/// Beat detection over a filtered zero-mean window. Beats are local maxima
/// with minimum spacing and prominence at least prominence_fraction of a
/// robust amplitude estimate; amplitude is the median peak-to-trough over
/// beats and rate comes from the median inter-beat interval. Poor quality is
/// a value, not an error.
PulseMetrics extract_pulse_metrics(const FilteredSeries& filtered, double mean_pressure,
                                   const PulseExtractionParams& params = {});

} // namespace bpclip
