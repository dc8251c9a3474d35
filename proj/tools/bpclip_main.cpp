// bpclip — command-line front end for the cuffless blood-pressure pipeline.
//
// Subcommands: analyze | simulate | envelope | compat | train.
// Exit codes: 0 ok, 2 protocol abort, 3 signal quality, 4 I/O, 5 usage/data.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bpclip/pipeline.hpp"

namespace fs = std::filesystem;
using namespace bpclip;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAborted = 2;
constexpr int kExitQuality = 3;
constexpr int kExitIo = 4;
constexpr int kExitUsage = 5;

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case errc::session_aborted:
        case errc::not_complete:
            return kExitAborted;
        case errc::empty_output:
        case errc::too_short:
        case errc::sampling_too_sparse:
        case errc::insufficient_levels:
        case errc::fit_diverged:
        case errc::flat_oscillogram:
        case errc::implausible_estimate:
        case errc::no_projection:
        case errc::saturated:
        case errc::disc_clipped:
            return kExitQuality;
        case errc::io_error:
        case errc::bad_format:
            return kExitIo;
        default:
            return kExitUsage;
    }
}

int fail(const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
}

SessionConfig load_protocol_override(const std::string& path) {
    // Accepts either a bare protocol object or a manifest-style document
    // with a "protocol" member.
    std::ifstream in(path);
    if (!in) throw Error(errc::io_error, path + ": cannot open");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        SessionManifest m = manifest_from_json(text);
        return m.protocol;
    } catch (const Error&) {
        SessionManifest wrapper;
        const std::string wrapped = R"({"schema_version":1,"profile":"x","mode":"series",)"
                                    R"("series_file":"x","frame_rate":30,"protocol":)" +
                                    text + "}";
        wrapper = manifest_from_json(wrapped);
        return wrapper.protocol;
    }
}

struct AnalyzeArgs {
    std::string manifest;
    std::string model_path;
    std::string protocol_path;
    std::string events_path;
    std::string ppg_csv_path;
    double ratio_systolic = FixedRatios{}.systolic;
    double ratio_diastolic = FixedRatios{}.diastolic;
};

AnalysisResult run_analysis(const AnalyzeArgs& args) {
    AnalyzeOptions options;
    options.ratios.systolic = args.ratio_systolic;
    options.ratios.diastolic = args.ratio_diastolic;
    if (!args.model_path.empty()) options.model = load_model(args.model_path);

    SessionManifest manifest = load_manifest(args.manifest);
    if (!args.protocol_path.empty()) manifest.protocol = load_protocol_override(args.protocol_path);

    const fs::path base = fs::path(args.manifest).parent_path();
    const DeviceProfile profile = load_profile(base / manifest.profile_path);

    AnalysisResult result;
    std::vector<PressureSample> samples;
    if (manifest.mode == CaptureMode::frames) {
        const std::vector<Frame> frames =
            read_frame_dir(base / manifest.frames_dir, manifest.frame_rate);
        const SampleExtraction extraction = frames_to_samples(frames, profile, options.detect);
        samples = extraction.samples;
        result = analyze_samples(samples, profile, manifest.protocol, options);
        result.frames_total = extraction.frames_total;
        result.frames_dropped = extraction.frames_dropped;
    } else {
        samples = read_series_csv(base / manifest.series_file);
        result = analyze_samples(samples, profile, manifest.protocol, options);
        result.frames_total = static_cast<int>(samples.size());
    }

    if (!args.events_path.empty()) write_events_jsonl(args.events_path, result.events);
    if (!args.ppg_csv_path.empty()) {
        const FilteredSeries filtered = detrend_bandpass(samples, manifest.protocol.passband);
        write_ppg_csv(args.ppg_csv_path, samples, filtered);
    }
    return result;
}

struct SimulateArgs {
    std::string out_dir;
    double systolic = 120.0, diastolic = 80.0, heart_rate = 70.0;
    double noise_sd = 0.0, jitter_sd = 0.0, skew = 0.0;
    double baseline = 170.0, gain = 12.0;
    std::uint64_t seed = 1;
    bool frames = false;
    double fs = 30.0;
    int frame_size = 192;
    int fail_at_level = -1;
    std::string profile_path;
    std::string protocol_path;
};

int cmd_simulate(const SimulateArgs& args) {
    if (args.systolic <= args.diastolic) {
        throw Error(errc::inconsistent_config, "systolic must exceed diastolic");
    }
    SyntheticSubject subject = make_subject(args.systolic, args.diastolic, args.heart_rate);
    subject.noise_sd = args.noise_sd;
    subject.envelope_skew = args.skew;
    subject.baseline_brightness = args.baseline;
    subject.pulse_gain = args.gain;

    DeviceProfile profile;
    if (!args.profile_path.empty()) profile = load_profile(args.profile_path);
    SessionConfig config;
    if (!args.protocol_path.empty()) config = load_protocol_override(args.protocol_path);

    SimulationOptions options;
    options.fs = args.fs;
    options.pressure_jitter_sd = args.jitter_sd;
    options.render_frames = args.frames;
    options.frame_width = args.frame_size;
    options.frame_height = args.frame_size;
    options.fail_at_level = args.fail_at_level;

    const SyntheticSession session =
        simulate_session(subject, profile, config, options, args.seed);
    const fs::path manifest = export_session(args.out_dir, session);
    std::cout << manifest.string() << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cuffless blood-pressure measurement pipeline"};
    app.require_subcommand(1);

    // analyze
    AnalyzeArgs an;
    CLI::App* analyze = app.add_subcommand("analyze", "estimate blood pressure from a session");
    analyze->add_option("manifest", an.manifest, "session manifest JSON")->required();
    analyze->add_option("--model", an.model_path, "regression model JSON (default: fixed-ratio)");
    analyze->add_option("--protocol", an.protocol_path, "JSON protocol config override");
    analyze->add_option("--ratio-systolic", an.ratio_systolic, "fixed-ratio systolic fraction");
    analyze->add_option("--ratio-diastolic", an.ratio_diastolic, "fixed-ratio diastolic fraction");
    analyze->add_option("--events", an.events_path, "write the session event log (JSON lines)");
    analyze->add_option("--ppg-csv", an.ppg_csv_path, "dump t,raw,filtered brightness CSV");

    // simulate
    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate", "synthesize a ground-truth session");
    simulate->add_option("--out", sim.out_dir, "output directory")->required();
    simulate->add_option("--sbp", sim.systolic, "true systolic, mmHg");
    simulate->add_option("--dbp", sim.diastolic, "true diastolic, mmHg");
    simulate->add_option("--hr", sim.heart_rate, "heart rate, bpm");
    simulate->add_option("--seed", sim.seed, "RNG seed");
    simulate->add_option("--noise-sd", sim.noise_sd, "brightness noise SD");
    simulate->add_option("--jitter-sd", sim.jitter_sd, "in-band pressure jitter SD, mmHg");
    simulate->add_option("--skew", sim.skew, "envelope skew in (-0.9, 0.9)");
    simulate->add_option("--baseline", sim.baseline, "baseline brightness");
    simulate->add_option("--gain", sim.gain, "pulse gain at the envelope peak");
    simulate->add_option("--fs", sim.fs, "sample/frame rate, Hz");
    simulate->add_flag("--frames", sim.frames, "render PGM frames instead of a series CSV");
    simulate->add_option("--frame-size", sim.frame_size, "square frame edge, pixels");
    simulate->add_option("--fail-at-level", sim.fail_at_level,
                         "stall below this level's band so the session aborts");
    simulate->add_option("--profile", sim.profile_path, "device profile JSON");
    simulate->add_option("--protocol", sim.protocol_path, "protocol config JSON");

    // envelope
    AnalyzeArgs env;
    std::string env_csv, env_svg;
    CLI::App* envelope = app.add_subcommand("envelope", "export the oscillogram and fitted curve");
    envelope->add_option("manifest", env.manifest, "session manifest JSON")->required();
    envelope->add_option("--csv", env_csv, "oscillogram CSV output")->required();
    envelope->add_option("--svg", env_svg, "scatter + fitted-curve SVG output");
    envelope->add_option("--protocol", env.protocol_path, "JSON protocol config override");

    // compat
    double compat_distance = -1.0;
    std::string compat_phone, compat_registry;
    CLI::App* compat = app.add_subcommand("compat", "check phone compatibility");
    compat->add_option("--distance", compat_distance, "flashlight-to-camera distance, mm");
    compat->add_option("--phone", compat_phone, "phone model string (requires --registry)");
    compat->add_option("--registry", compat_registry, "directory of device profile JSON files");

    // train
    std::vector<std::string> train_manifests;
    std::string train_out;
    CLI::App* train = app.add_subcommand("train", "fit the regression decode model");
    train->add_option("--out", train_out, "model JSON output path")->required();
    train->add_option("manifests", train_manifests, "labeled session manifests")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*analyze) {
            const AnalysisResult result = run_analysis(an);
            std::cout << analysis_to_json(result);
            return kExitOk;
        }
        if (*simulate) {
            return cmd_simulate(sim);
        }
        if (*envelope) {
            const AnalysisResult result = run_analysis(env);
            write_envelope_csv(env_csv, result.oscillogram);
            if (!env_svg.empty()) write_envelope_svg(env_svg, result.oscillogram, result.envelope);
            std::cout << env_csv << "\n";
            return kExitOk;
        }
        if (*compat) {
            double distance = compat_distance;
            if (distance < 0.0) {
                if (compat_phone.empty() || compat_registry.empty()) {
                    throw Error(errc::usage, "need --distance, or --phone with --registry");
                }
                distance = find_profile_by_phone_model(compat_registry, compat_phone)
                               .flash_cam_distance;
            }
            const bool ok = check_phone_compatibility(distance);
            std::printf("%s: flashlight-to-camera distance %.1f mm (limit %.1f mm)\n",
                        ok ? "compatible" : "incompatible", distance, kMaxFlashCamDistanceMm);
            return kExitOk;
        }
        if (*train) {
            std::vector<LabeledFeatures> rows;
            int skipped = 0;
            for (const std::string& manifest_path : train_manifests) {
                const SessionManifest manifest = load_manifest(manifest_path);
                const auto sbp_it = manifest.metadata.find("label_systolic");
                const auto dbp_it = manifest.metadata.find("label_diastolic");
                if (sbp_it == manifest.metadata.end() || dbp_it == manifest.metadata.end()) {
                    throw Error(errc::insufficient_data,
                                manifest_path + " lacks label_systolic/label_diastolic metadata");
                }
                try {
                    const AnalysisResult r = analyze_manifest(manifest_path);
                    LabeledFeatures row;
                    row.features = regression_features(r.oscillogram, r.envelope,
                                                       r.estimate.heart_rate_bpm);
                    row.systolic = std::stod(sbp_it->second);
                    row.diastolic = std::stod(dbp_it->second);
                    rows.push_back(std::move(row));
                } catch (const Error& e) {
                    // a session that cannot be analyzed is excluded, not fatal;
                    // the sample-size gate below still applies
                    ++skipped;
                    std::cerr << "warning: skipping " << manifest_path << ": " << e.what() << "\n";
                }
            }
            const RegressionModel model = train_regression(rows);
            save_model(train_out, model);
            std::cout << "trained on " << rows.size() << " sessions";
            if (skipped > 0) std::cout << " (" << skipped << " skipped)";
            std::cout << "\n";
            for (const auto& [key, value] : model.metadata) {
                std::cout << "  " << key << ": " << value << "\n";
            }
            return kExitOk;
        }
    } catch (const Error& e) {
        return fail(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
