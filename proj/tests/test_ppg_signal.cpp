#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "bpclip/digital_twin.hpp"
#include "bpclip/ppg_signal.hpp"
#include "test_util.hpp"

using namespace bpclip;
using namespace bpclip::test;

TEST_SUITE_BEGIN("ppg_signal");

namespace {

std::vector<PressureSample> series_from(const std::vector<double>& values, double fs,
                                        double pressure = 80.0) {
    std::vector<PressureSample> out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out.push_back({static_cast<double>(i) / fs, pressure, values[i], 100.0});
    }
    return out;
}

// Single-frequency amplitude by projection onto the quadrature pair.
double tone_amplitude(const std::vector<double>& x, double fs, double hz) {
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = 2.0 * std::numbers::pi * hz * static_cast<double>(i) / fs;
        s += x[i] * std::sin(w);
        c += x[i] * std::cos(w);
    }
    return 2.0 * std::hypot(s, c) / static_cast<double>(x.size());
}

FilteredSeries as_filtered(const std::vector<double>& values, double fs) {
    return {0.0, fs, values};
}

} // namespace

TEST_CASE("constant input filters to zero") {
    const double fs = 30.0;
    const FilteredSeries out = detrend_bandpass(series_from(std::vector<double>(300, 100.0), fs));
    for (double v : out.values) CHECK(std::abs(v) <= 1e-9);
    CHECK(out.fs == doctest::Approx(fs));
}

TEST_CASE("slow drift is removed, the pulse band survives") {
    const double fs = 30.0;
    std::vector<double> x;
    for (int i = 0; i < 1200; ++i) { // 40 s: integer periods of both tones
        const double t = i / fs;
        x.push_back(std::sin(2.0 * std::numbers::pi * 1.2 * t) +
                    20.0 * std::sin(2.0 * std::numbers::pi * 0.05 * t));
    }
    const FilteredSeries out = detrend_bandpass(series_from(x, fs));
    CHECK(tone_amplitude(out.values, fs, 0.05) < 0.05);
    CHECK(tone_amplitude(out.values, fs, 1.2) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("out-of-band tone attenuated at least 20 dB") {
    const double fs = 100.0;
    std::vector<double> x;
    for (int i = 0; i < 1000; ++i) {
        x.push_back(std::sin(2.0 * std::numbers::pi * 30.0 * i / fs));
    }
    const FilteredSeries out = detrend_bandpass(series_from(x, fs));
    CHECK(tone_amplitude(out.values, fs, 30.0) < 0.1); // -20 dB on unit input
}

TEST_CASE("window preconditions") {
    const double fs = 30.0;
    CHECK(thrown_code([&] {
              detrend_bandpass(series_from(std::vector<double>(60, 1.0), fs)); // 2 s
          }) == errc::too_short);
    CHECK(thrown_code([&] {
              detrend_bandpass(series_from(std::vector<double>(50, 1.0), 10.0)); // 5 s @ 10 Hz
          }) == errc::sampling_too_sparse);
}

TEST_CASE("sinusoid metrics") {
    const double fs = 100.0;
    std::vector<double> x;
    for (int i = 0; i < 1000; ++i) { // 10 s at 1.2 Hz, amplitude 5
        x.push_back(5.0 * std::sin(2.0 * std::numbers::pi * 1.2 * i / fs));
    }
    const PulseMetrics m = extract_pulse_metrics(as_filtered(x, fs), 92.0);
    CHECK(m.quality == SignalQuality::good);
    CHECK(near_abs(m.heart_rate_bpm, 72.0, 1.0));
    CHECK(near_abs(m.pulse_amplitude, 10.0, 0.5));
    CHECK(m.n_beats >= 10);
    CHECK(m.mean_pressure == 92.0);
}

TEST_CASE("flat window is poor, not an error") {
    const PulseMetrics m = extract_pulse_metrics(as_filtered(std::vector<double>(300, 0.0), 30.0), 80.0);
    CHECK(m.quality == SignalQuality::poor);
    CHECK(m.pulse_amplitude == 0.0);
    CHECK(m.n_beats == 0);
}

TEST_CASE("noisy beat train amplitude within 10%") {
    const double fs = 30.0;
    const double amplitude = 8.0;
    TwinRng rng(5);
    std::vector<double> x;
    for (int i = 0; i < 300; ++i) { // 10 s at 66 bpm
        const double t = i / fs;
        // pulse_wave has unit peak-to-trough; 20 dB SNR on the RMS
        x.push_back(amplitude * pulse_wave(1.1 * t) + 0.28 * rng.normal());
    }
    const FilteredSeries out = detrend_bandpass(series_from(x, fs));
    const PulseMetrics m = extract_pulse_metrics(out, 100.0);
    CHECK(m.quality == SignalQuality::good);
    CHECK(near_rel(m.pulse_amplitude, amplitude, 0.10));
    CHECK(near_abs(m.heart_rate_bpm, 66.0, 2.0));
}

TEST_CASE("gain scales amplitude and leaves rate alone") {
    const double fs = 30.0;
    std::vector<double> base;
    for (int i = 0; i < 300; ++i) base.push_back(6.0 * pulse_wave(1.2 * i / fs));
    const PulseMetrics ref = extract_pulse_metrics(as_filtered(base, fs), 90.0);
    for (double g : {0.25, 0.5, 2.0, 4.0}) {
        std::vector<double> scaled;
        for (double v : base) scaled.push_back(g * v);
        const PulseMetrics m = extract_pulse_metrics(as_filtered(scaled, fs), 90.0);
        CHECK(near_rel(m.pulse_amplitude, g * ref.pulse_amplitude, 1e-9));
        CHECK(m.heart_rate_bpm == doctest::Approx(ref.heart_rate_bpm));
        CHECK(m.n_beats == ref.n_beats);
    }
}

TEST_CASE("time reversal changes nothing material") {
    const double fs = 30.0;
    TwinRng rng(17);
    std::vector<double> x;
    for (int i = 0; i < 300; ++i) x.push_back(5.0 * pulse_wave(1.0 * i / fs) + 0.1 * rng.normal());
    const PulseMetrics fwd = extract_pulse_metrics(as_filtered(x, fs), 90.0);
    std::reverse(x.begin(), x.end());
    const PulseMetrics rev = extract_pulse_metrics(as_filtered(x, fs), 90.0);
    CHECK(near_rel(fwd.pulse_amplitude, rev.pulse_amplitude, 0.01));
    CHECK(near_rel(fwd.heart_rate_bpm, rev.heart_rate_bpm, 0.01));
}

TEST_CASE("DC offset has no effect through the filter") {
    const double fs = 30.0;
    std::vector<double> x;
    for (int i = 0; i < 300; ++i) x.push_back(4.0 * pulse_wave(1.2 * i / fs));
    std::vector<double> shifted;
    for (double v : x) shifted.push_back(v + 57.0);
    const FilteredSeries a = detrend_bandpass(series_from(x, fs));
    const FilteredSeries b = detrend_bandpass(series_from(shifted, fs));
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        CHECK(near_abs(a.values[i], b.values[i], 1e-9));
    }
}

TEST_SUITE_END();
