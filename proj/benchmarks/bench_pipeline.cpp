#include <benchmark/benchmark.h>

#include <cmath>

#include "bpclip/pipeline.hpp"

using namespace bpclip;

namespace {

Frame make_disc_frame(int size) {
    DeviceProfile p;
    return render_frame(9.0, 180.0, p, size, size);
}

void BM_RenderFrame(benchmark::State& state) {
    DeviceProfile p;
    const int size = static_cast<int>(state.range(0));
    for (auto _ : state) {
        Frame f = render_frame(9.0, 180.0, p, size, size);
        benchmark::DoNotOptimize(f.pixels.data());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RenderFrame)->Arg(128)->Arg(176)->Arg(256);

void BM_DetectCircle(benchmark::State& state) {
    const Frame f = make_disc_frame(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        CircleObservation obs = detect_circle(f);
        benchmark::DoNotOptimize(obs);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DetectCircle)->Arg(128)->Arg(176)->Arg(256);

void BM_DetrendBandpass(benchmark::State& state) {
    const double fs = 30.0;
    std::vector<PressureSample> window;
    for (int i = 0; i < state.range(0); ++i) {
        window.push_back({i / fs, 100.0, 170.0 + 8.0 * pulse_wave(1.2 * i / fs), 110.0});
    }
    for (auto _ : state) {
        FilteredSeries out = detrend_bandpass(window);
        benchmark::DoNotOptimize(out.values.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DetrendBandpass)->Arg(150)->Arg(600)->Arg(3000);

void BM_ExtractPulseMetrics(benchmark::State& state) {
    const double fs = 30.0;
    std::vector<PressureSample> window;
    for (int i = 0; i < 150; ++i) {
        window.push_back({i / fs, 100.0, 170.0 + 8.0 * pulse_wave(1.2 * i / fs), 110.0});
    }
    const FilteredSeries filtered = detrend_bandpass(window);
    for (auto _ : state) {
        PulseMetrics m = extract_pulse_metrics(filtered, 100.0);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(BM_ExtractPulseMetrics);

void BM_FitEnvelope(benchmark::State& state) {
    Oscillogram o;
    for (int k = 0; k < 10; ++k) {
        const double p = 40.0 + k * 150.0 / 9.0;
        o.points.push_back(
            {p, 10.0 * std::exp(-(p - 95.0) * (p - 95.0) / (2.0 * 24.0 * 24.0)), 10,
             SignalQuality::good});
    }
    for (auto _ : state) {
        EnvelopeFit fit = fit_envelope(o);
        benchmark::DoNotOptimize(fit);
    }
}
BENCHMARK(BM_FitEnvelope);

void BM_SimulateSession(benchmark::State& state) {
    const SyntheticSubject subject = make_subject(120.0, 80.0, 70.0);
    std::uint64_t seed = 1;
    for (auto _ : state) {
        SyntheticSession s =
            simulate_session(subject, DeviceProfile{}, SessionConfig{}, SimulationOptions{}, seed++);
        benchmark::DoNotOptimize(s.samples.data());
    }
}
BENCHMARK(BM_SimulateSession);

void BM_AnalyzeSamples(benchmark::State& state) {
    const SyntheticSubject subject = make_subject(120.0, 80.0, 70.0);
    const SyntheticSession session =
        simulate_session(subject, DeviceProfile{}, SessionConfig{}, SimulationOptions{}, 3);
    AnalyzeOptions options;
    options.ratios = matched_ratios();
    for (auto _ : state) {
        AnalysisResult r =
            analyze_samples(session.samples, session.profile, session.config, options);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_AnalyzeSamples);

} // namespace

BENCHMARK_MAIN();
