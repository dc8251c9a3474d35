#include "bpclip/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace bpclip {

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + mid));
    return m;
}

} // namespace

AnalysisResult analyze_samples(const std::vector<PressureSample>& samples,
                               const DeviceProfile& profile, const SessionConfig& config,
                               const AnalyzeOptions& options) {
    profile.validate();
    SessionMachine machine(config);
    for (const PressureSample& s : samples) {
        machine.advance(s);
        if (machine.state().terminal()) break;
    }
    if (machine.state().phase == Phase::aborted) {
        throw Error(errc::session_aborted, to_string(machine.state().abort_reason));
    }
    if (machine.state().phase != Phase::complete) {
        throw Error(errc::session_aborted, "incomplete_stream");
    }

    AnalysisResult result;
    result.events = machine.events();
    result.levels = machine.finalize();

    std::vector<double> rates;
    for (const PulseMetrics& m : result.levels) {
        if (m.quality == SignalQuality::good) rates.push_back(m.heart_rate_bpm);
    }
    const double heart_rate = median_of(rates);

    result.oscillogram = build_oscillogram(result.levels);
    result.envelope = fit_envelope(result.oscillogram, options.fit_options);
    if (options.model.has_value()) {
        result.estimate =
            estimate_regression(result.oscillogram, result.envelope, *options.model, heart_rate);
    } else {
        result.estimate = estimate_fixed_ratio(result.envelope, options.ratios, heart_rate);
    }
    return result;
}

AnalysisResult analyze_frames(const std::vector<Frame>& frames, const DeviceProfile& profile,
                              const SessionConfig& config, const AnalyzeOptions& options) {
    const SampleExtraction extraction = frames_to_samples(frames, profile, options.detect);
    AnalysisResult result = analyze_samples(extraction.samples, profile, config, options);
    result.frames_total = extraction.frames_total;
    result.frames_dropped = extraction.frames_dropped;
    return result;
}

AnalysisResult analyze_manifest(const fs::path& manifest_path, const AnalyzeOptions& options) {
    const SessionManifest manifest = load_manifest(manifest_path);
    const fs::path base = manifest_path.parent_path();
    const DeviceProfile profile = load_profile(base / manifest.profile_path);

    if (manifest.mode == CaptureMode::frames) {
        const std::vector<Frame> frames =
            read_frame_dir(base / manifest.frames_dir, manifest.frame_rate);
        AnalysisResult result = analyze_frames(frames, profile, manifest.protocol, options);
        return result;
    }
    const std::vector<PressureSample> samples = read_series_csv(base / manifest.series_file);
    AnalysisResult result = analyze_samples(samples, profile, manifest.protocol, options);
    result.frames_total = static_cast<int>(samples.size());
    return result;
}

std::string analysis_to_json(const AnalysisResult& result) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["estimate"] = {
        {"systolic", result.estimate.systolic},
        {"diastolic", result.estimate.diastolic},
        {"map", result.estimate.map},
        {"heart_rate_bpm", result.estimate.heart_rate_bpm},
        {"method", to_string(result.estimate.method)},
        {"confidence", result.estimate.confidence},
        {"in_validity_range", result.estimate.in_validity_range},
    };
    j["envelope"] = {
        {"a_max", result.envelope.a_max},
        {"map", result.envelope.map},
        {"sigma", result.envelope.sigma},
        {"rms_residual", result.envelope.rms_residual},
    };
    j["levels"] = json::array();
    for (const PulseMetrics& m : result.levels) {
        j["levels"].push_back({
            {"pressure_mmhg", m.mean_pressure},
            {"amplitude", m.pulse_amplitude},
            {"n_beats", m.n_beats},
            {"heart_rate_bpm", m.heart_rate_bpm},
            {"quality", to_string(m.quality)},
        });
    }
    j["oscillogram"] = json::array();
    for (const OscillogramPoint& p : result.oscillogram.points) {
        j["oscillogram"].push_back({
            {"pressure_mmhg", p.pressure},
            {"amplitude", p.amplitude},
            {"n_beats", p.n_beats},
        });
    }
    j["drops"] = {
        {"frames_total", result.frames_total},
        {"frames_dropped", result.frames_dropped},
    };
    j["session"] = {
        {"events", result.events.size()},
    };
    return j.dump(2) + "\n";
}

} // namespace bpclip
