#include "bpclip/ppg_signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace bpclip {

const char* to_string(SignalQuality q) noexcept {
    return q == SignalQuality::good ? "good" : "poor";
}

namespace {

struct Biquad {
    double b0, b1, b2, a1, a2;
};

Biquad butter2_lowpass(double fc, double fs) {
    const double c = std::tan(std::numbers::pi * fc / fs);
    const double a0 = 1.0 + std::numbers::sqrt2 * c + c * c;
    return {c * c / a0, 2.0 * c * c / a0, c * c / a0, 2.0 * (c * c - 1.0) / a0,
            (1.0 - std::numbers::sqrt2 * c + c * c) / a0};
}

Biquad butter2_highpass(double fc, double fs) {
    const double c = std::tan(std::numbers::pi * fc / fs);
    const double a0 = 1.0 + std::numbers::sqrt2 * c + c * c;
    return {1.0 / a0, -2.0 / a0, 1.0 / a0, 2.0 * (c * c - 1.0) / a0,
            (1.0 - std::numbers::sqrt2 * c + c * c) / a0};
}

// Direct form II transposed with caller-supplied initial state.
void run_filter(const Biquad& f, std::vector<double>& x) {
    // steady-state internal state for a unit step, scaled by the first sample;
    // keeps the forward and backward passes free of startup transients.
    const double dc_gain = (f.b0 + f.b1 + f.b2) / (1.0 + f.a1 + f.a2);
    const double zi1 = dc_gain - f.b0;
    const double zi2 = f.b2 - f.a2 * dc_gain;
    double z1 = zi1 * x.front();
    double z2 = zi2 * x.front();
    for (double& xi : x) {
        const double yi = f.b0 * xi + z1;
        z1 = f.b1 * xi - f.a1 * yi + z2;
        z2 = f.b2 * xi - f.a2 * yi;
        xi = yi;
    }
}

// Zero-phase pass: odd-reflection padding, filter, reverse, filter, reverse.
std::vector<double> filtfilt(const Biquad& f, const std::vector<double>& x, std::size_t padlen) {
    const std::size_t n = x.size();
    padlen = std::min(padlen, n - 1);
    std::vector<double> ext;
    ext.reserve(n + 2 * padlen);
    for (std::size_t i = 0; i < padlen; ++i) ext.push_back(2.0 * x[0] - x[padlen - i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 0; i < padlen; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 2 - i]);

    run_filter(f, ext);
    std::reverse(ext.begin(), ext.end());
    run_filter(f, ext);
    std::reverse(ext.begin(), ext.end());

    return {ext.begin() + static_cast<std::ptrdiff_t>(padlen),
            ext.begin() + static_cast<std::ptrdiff_t>(padlen + n)};
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        const double lo = *std::max_element(v.begin(), v.begin() + mid);
        m = 0.5 * (m + lo);
    }
    return m;
}

double quantile_of(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

} // namespace

FilteredSeries detrend_bandpass(const std::vector<PressureSample>& window, Passband band) {
    if (window.size() < 2) {
        throw Error(errc::too_short, "window has fewer than 2 samples");
    }
    const double duration = window.back().t - window.front().t;
    if (duration < 3.0) {
        throw Error(errc::too_short, "window spans " + std::to_string(duration) + " s, need >= 3 s");
    }
    const double fs = static_cast<double>(window.size() - 1) / duration;
    if (fs < 15.0) {
        throw Error(errc::sampling_too_sparse,
                    "effective rate " + std::to_string(fs) + " Hz, need >= 15 Hz");
    }
    if (!(band.low_hz > 0.0) || !(band.high_hz > band.low_hz)) {
        throw Error(errc::invalid_config, "passband must satisfy 0 < low < high");
    }
    // The default 10 Hz corner is above Nyquist at low frame rates; pull it in.
    const double high_hz = std::min(band.high_hz, 0.45 * fs);
    if (!(high_hz > band.low_hz)) {
        throw Error(errc::sampling_too_sparse,
                    "rate " + std::to_string(fs) + " Hz leaves no usable passband");
    }

    std::vector<double> x;
    x.reserve(window.size());
    for (const PressureSample& s : window) x.push_back(s.brightness);
    const double mean0 = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    for (double& v : x) v -= mean0;

    const std::size_t padlen = static_cast<std::size_t>(std::ceil(3.0 * fs / band.low_hz));
    x = filtfilt(butter2_highpass(band.low_hz, fs), x, padlen);
    x = filtfilt(butter2_lowpass(high_hz, fs), x, padlen);

    const double mean1 = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    for (double& v : x) v -= mean1;

    FilteredSeries out;
    out.t0 = window.front().t;
    out.fs = fs;
    out.values = std::move(x);
    return out;
}

PulseMetrics extract_pulse_metrics(const FilteredSeries& filtered, double mean_pressure,
                                   const PulseExtractionParams& params) {
    PulseMetrics m;
    m.mean_pressure = mean_pressure;
    const std::vector<double>& x = filtered.values;
    if (x.size() < 3) return m;

    const double amp_est = 0.5 * (quantile_of(x, 0.975) - quantile_of(x, 0.025));
    if (!(amp_est > 0.0)) return m; // flat window, nothing to measure

    // Robust noise scale: successive differences are slope-dominated for the
    // pulse but noise-dominated for broadband contamination.
    std::vector<double> diffs;
    diffs.reserve(x.size() - 1);
    for (std::size_t k = 1; k < x.size(); ++k) diffs.push_back(std::abs(x[k] - x[k - 1]));
    const double noise_est = 1.4826 * median_of(diffs) / std::numbers::sqrt2;

    const double prominence_floor =
        std::max(params.prominence_fraction * amp_est, params.noise_floor_multiple * noise_est);

    // Local maxima (plateau-aware), then prominence gate. A systolic peak in
    // a zero-mean window sits above zero; maxima below it are trough texture.
    struct Candidate {
        std::size_t idx;
        double value;
        double prominence;
    };
    std::vector<Candidate> cands;
    std::size_t i = 1;
    while (i + 1 < x.size()) {
        if (x[i] > x[i - 1]) {
            std::size_t j = i;
            while (j + 1 < x.size() && x[j + 1] == x[j]) ++j;
            if (j + 1 < x.size() && x[j + 1] < x[j] && x[i] > 0.0) {
                cands.push_back({(i + j) / 2, x[i], 0.0});
            }
            i = j + 1;
        } else {
            ++i;
        }
    }
    // Prominence: height above the higher of the two valley floors toward the
    // nearest strictly-higher sample on each side.
    for (Candidate& c : cands) {
        double left_min = c.value;
        for (std::size_t k = c.idx; k-- > 0;) {
            if (x[k] > c.value) break;
            left_min = std::min(left_min, x[k]);
        }
        double right_min = c.value;
        for (std::size_t k = c.idx + 1; k < x.size(); ++k) {
            if (x[k] > c.value) break;
            right_min = std::min(right_min, x[k]);
        }
        c.prominence = c.value - std::max(left_min, right_min);
    }
    std::erase_if(cands, [&](const Candidate& c) { return c.prominence < prominence_floor; });

    // Enforce minimum spacing, keeping the taller peak on conflict.
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
    const double min_gap = params.min_beat_spacing_s * filtered.fs;
    std::vector<std::size_t> peaks;
    for (const Candidate& c : cands) {
        bool ok = true;
        for (std::size_t p : peaks) {
            if (std::abs(static_cast<double>(p) - static_cast<double>(c.idx)) < min_gap) {
                ok = false;
                break;
            }
        }
        if (ok) peaks.push_back(c.idx);
    }
    std::sort(peaks.begin(), peaks.end());

    m.n_beats = static_cast<int>(peaks.size());
    if (peaks.empty()) return m;

    // Per-beat amplitude: peak minus the trough preceding it.
    std::vector<double> amplitudes;
    for (std::size_t k = 0; k < peaks.size(); ++k) {
        const std::size_t from = k == 0 ? 0 : peaks[k - 1];
        const double trough = *std::min_element(x.begin() + static_cast<std::ptrdiff_t>(from),
                                                x.begin() + static_cast<std::ptrdiff_t>(peaks[k]) + 1);
        amplitudes.push_back(x[peaks[k]] - trough);
    }
    m.pulse_amplitude = median_of(amplitudes);

    if (peaks.size() >= 2) {
        std::vector<double> ibis;
        for (std::size_t k = 1; k < peaks.size(); ++k) {
            ibis.push_back(static_cast<double>(peaks[k] - peaks[k - 1]) / filtered.fs);
        }
        const double med_ibi = median_of(ibis);
        m.heart_rate_bpm = med_ibi > 0.0 ? 60.0 / med_ibi : 0.0;

        const double mean_ibi =
            std::accumulate(ibis.begin(), ibis.end(), 0.0) / static_cast<double>(ibis.size());
        double var = 0.0;
        for (double v : ibis) var += (v - mean_ibi) * (v - mean_ibi);
        var /= static_cast<double>(ibis.size());
        const double cv = mean_ibi > 0.0 ? std::sqrt(var) / mean_ibi : 1.0;

        const bool hr_in_range = m.heart_rate_bpm >= params.min_heart_rate_bpm &&
                                 m.heart_rate_bpm <= params.max_heart_rate_bpm;
        if (m.n_beats >= params.min_beats && cv <= params.max_ibi_cv && hr_in_range) {
            m.quality = SignalQuality::good;
        }
    }
    return m;
}

} // namespace bpclip
