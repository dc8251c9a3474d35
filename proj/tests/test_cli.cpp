// Integration tests for the bpclip executable: every subcommand, the exit-code
// map, and byte-level determinism of generated sessions. Drives the real
// binary through popen.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bpclip/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bpclip;

namespace {

int failures = 0;

#define EXPECT(cond, label)                                              \
    do {                                                                 \
        if (cond) {                                                      \
            std::cout << "[ok] " << label << "\n";                       \
        } else {                                                         \
            std::cout << "[FAILED] " << label << " (" << __FILE__ << ":" \
                      << __LINE__ << ")\n";                              \
            ++failures;                                                  \
        }                                                                \
    } while (0)

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout + stderr interleaved
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(BPCLIP_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {};
    RunResult r;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof(buf), pipe)) r.output.append(buf, n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

int main() {
    const fs::path dir = fs::temp_directory_path() / "bpclip_cli_tests";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string d = dir.string();

    const FixedRatios ratios = matched_ratios();
    char ratio_buf[96];
    std::snprintf(ratio_buf, sizeof(ratio_buf), " --ratio-systolic %.17g --ratio-diastolic %.17g",
                  ratios.systolic, ratios.diastolic);
    const std::string ratio_flags = ratio_buf;

    // simulate then analyze: the full round trip through disk
    {
        const RunResult sim = run("simulate --out " + d + "/s1 --sbp 120 --dbp 80 --hr 70 --seed 3");
        EXPECT(sim.exit_code == 0, "simulate exits 0");

        const RunResult an = run("analyze " + d + "/s1/manifest.json" + ratio_flags);
        EXPECT(an.exit_code == 0, "analyze exits 0 on a clean session");
        const json out = json::parse(an.output, nullptr, false);
        EXPECT(!out.is_discarded(), "analyze emits parseable JSON");
        EXPECT(std::abs(out["estimate"]["systolic"].get<double>() - 120.0) <= 2.0,
               "systolic within 2 mmHg of truth");
        EXPECT(std::abs(out["estimate"]["diastolic"].get<double>() - 80.0) <= 2.0,
               "diastolic within 2 mmHg of truth");
        EXPECT(out["estimate"]["in_validity_range"].get<bool>(), "estimate in validity range");
    }

    // identical seeds produce byte-identical session directories
    {
        run("simulate --out " + d + "/same_a --seed 42 --noise-sd 1.5 --jitter-sd 2");
        run("simulate --out " + d + "/same_b --seed 42 --noise-sd 1.5 --jitter-sd 2");
        EXPECT(slurp(dir / "same_a/series.csv") == slurp(dir / "same_b/series.csv"),
               "same seed, same series bytes");
        EXPECT(slurp(dir / "same_a/manifest.json") == slurp(dir / "same_b/manifest.json"),
               "same seed, same manifest bytes");
    }

    // CLI output equals the in-process pipeline byte for byte
    {
        const RunResult an = run("analyze " + d + "/s1/manifest.json" + ratio_flags);
        AnalyzeOptions options;
        options.ratios = ratios;
        const AnalysisResult direct = analyze_manifest(dir / "s1/manifest.json", options);
        EXPECT(an.output == analysis_to_json(direct), "CLI adds no computation");
    }

    // frames mode round trip
    {
        run("simulate --out " + d + "/fr --seed 9 --frames --fs 20 --frame-size 176");
        EXPECT(fs::exists(dir / "fr/frames/frame_000000.pgm"), "frames written as PGM");
        const RunResult an = run("analyze " + d + "/fr/manifest.json" + ratio_flags);
        EXPECT(an.exit_code == 0, "frames-mode analyze exits 0");
        const json out = json::parse(an.output, nullptr, false);
        EXPECT(std::abs(out["estimate"]["systolic"].get<double>() - 120.0) <= 2.0,
               "frames-mode systolic within 2 mmHg");
    }

    // protocol abort: fail-fast at the lowest level, exit 2, reason surfaced
    {
        run("simulate --out " + d + "/abort --seed 5 --fail-at-level 0");
        const RunResult an = run("analyze " + d + "/abort/manifest.json");
        EXPECT(an.exit_code == 2, "aborted session exits 2");
        EXPECT(an.output.find("first_level_failure") != std::string::npos,
               "abort reason names the first level");
        EXPECT(an.output.find("\"estimate\"") == std::string::npos, "no partial JSON on abort");
    }

    // missing frames directory: exit 4, no JSON
    {
        run("simulate --out " + d + "/broken --seed 6 --frames --fs 20 --frame-size 176");
        fs::remove_all(dir / "broken/frames");
        const RunResult an = run("analyze " + d + "/broken/manifest.json");
        EXPECT(an.exit_code == 4, "missing frames exit 4");
        EXPECT(an.output.find("\"estimate\"") == std::string::npos, "no partial JSON on I/O error");
    }

    // envelope artifacts
    {
        const RunResult env = run("envelope " + d + "/s1/manifest.json --csv " + d +
                                  "/e.csv --svg " + d + "/e.svg");
        EXPECT(env.exit_code == 0, "envelope exits 0");
        const std::string csv = slurp(dir / "e.csv");
        EXPECT(std::count(csv.begin(), csv.end(), '\n') == 7, "six oscillogram rows plus header");
        EXPECT(slurp(dir / "e.svg").find("<svg") != std::string::npos, "svg written");

        const Oscillogram o = read_envelope_csv(dir / "e.csv");
        AnalyzeOptions options;
        options.ratios = ratios;
        const AnalysisResult direct = analyze_manifest(dir / "s1/manifest.json", options);
        bool same = o.points.size() == direct.oscillogram.points.size();
        for (std::size_t i = 0; same && i < o.points.size(); ++i) {
            same = std::abs(o.points[i].pressure - direct.oscillogram.points[i].pressure) < 1e-6 &&
                   std::abs(o.points[i].amplitude - direct.oscillogram.points[i].amplitude) < 1e-6;
        }
        EXPECT(same, "csv re-parse rebuilds the oscillogram");
    }

    // flat session: no pulse, only noise -> quality failure, exit 3, no SVG
    {
        run("simulate --out " + d + "/flat --seed 8 --gain 0 --noise-sd 0.8");
        const RunResult env =
            run("envelope " + d + "/flat/manifest.json --csv " + d + "/f.csv --svg " + d + "/f.svg");
        EXPECT(env.exit_code == 3, "flat session exits 3");
        EXPECT(!fs::exists(dir / "f.svg"), "no SVG on quality failure");
    }

    // compat: explicit distance and registry lookup
    {
        RunResult c = run("compat --distance 12");
        EXPECT(c.exit_code == 0 && c.output.rfind("compatible", 0) == 0, "12 mm compatible");
        c = run("compat --distance 18");
        EXPECT(c.exit_code == 0 && c.output.rfind("incompatible", 0) == 0, "18 mm incompatible");
        c = run("compat --distance 16.0");
        EXPECT(c.output.rfind("compatible", 0) == 0, "16 mm boundary inclusive");

        fs::create_directories(dir / "registry");
        DeviceProfile p;
        p.flash_cam_distance = 9.0;
        save_profile(dir / "registry/one.json", p, "examplephone 4");
        c = run("compat --phone \"examplephone 4\" --registry " + d + "/registry");
        EXPECT(c.exit_code == 0 && c.output.rfind("compatible", 0) == 0, "registry lookup works");
        c = run("compat --phone \"unknown model\" --registry " + d + "/registry");
        EXPECT(c.exit_code == 5, "unknown phone model exits 5");
    }

    // train: too few sessions is a usage/data error
    {
        const RunResult tr =
            run("train --out " + d + "/model.json " + d + "/s1/manifest.json");
        EXPECT(tr.exit_code == 5, "insufficient training data exits 5");
        EXPECT(tr.output.find("InsufficientData") != std::string::npos, "error names the cause");
    }

    // train end to end on a short-protocol cohort, then analyze with the model
    {
        std::ofstream proto(dir / "short_protocol.json");
        proto << R"({"n_levels": 6, "pressure_targets": [40, 70, 100, 130, 160, 190],
                     "hold_tolerance": 8.0, "dwell_seconds": 3.0, "readings_per_level": 1,
                     "max_attempts_first_level": 2, "max_attempts_other": 3,
                     "reach_timeout_seconds": 10.0})";
        proto.close();

        std::string manifests;
        TwinRng rng(606);
        for (int i = 0; i < 85; ++i) {
            const double dbp = rng.uniform(60.0, 95.0);
            const double sbp = dbp + rng.uniform(25.0, 60.0);
            const std::string out = d + "/train_" + std::to_string(i);
            const RunResult sim = run("simulate --out " + out + " --sbp " + std::to_string(sbp) +
                                      " --dbp " + std::to_string(dbp) + " --hr " +
                                      std::to_string(rng.uniform(58.0, 88.0)) + " --seed " +
                                      std::to_string(4000 + i) + " --protocol " + d +
                                      "/short_protocol.json");
            if (sim.exit_code != 0) {
                std::cout << "simulate " << i << " failed:\n" << sim.output;
                break;
            }
            manifests += " " + out + "/manifest.json";
        }
        const RunResult tr = run("train --out " + d + "/model.json" + manifests);
        EXPECT(tr.exit_code == 0, "train exits 0 with a full cohort");
        if (tr.exit_code != 0) std::cout << tr.output;
        EXPECT(tr.output.find("train_mae_systolic") != std::string::npos,
               "train reports per-head MAE");
        EXPECT(fs::exists(dir / "model.json"), "model file written");

        run("simulate --out " + d + "/reg_eval --sbp 128 --dbp 84 --seed 9999 --protocol " + d +
            "/short_protocol.json");
        const RunResult an = run("analyze " + d + "/reg_eval/manifest.json --model " + d +
                                 "/model.json --protocol " + d + "/short_protocol.json");
        EXPECT(an.exit_code == 0, "regression analyze exits 0");
        const json out = json::parse(an.output, nullptr, false);
        EXPECT(!out.is_discarded(), "regression analyze emits JSON");
        if (!out.is_discarded()) {
            EXPECT(out["estimate"]["method"] == "regression", "regression method reported");
            EXPECT(std::abs(out["estimate"]["systolic"].get<double>() - 128.0) <= 4.0,
                   "regression systolic near truth");
        } else {
            std::cout << an.output;
        }
    }

    // events log and ppg debug dump land on disk when asked
    {
        const RunResult an = run("analyze " + d + "/s1/manifest.json --events " + d +
                                 "/ev.jsonl --ppg-csv " + d + "/ppg.csv" + ratio_flags);
        EXPECT(an.exit_code == 0, "analyze with debug outputs exits 0");
        const std::string events = slurp(dir / "ev.jsonl");
        EXPECT(events.find("\"prompt\":\"hold_steady\"") != std::string::npos,
               "events log holds prompts");
        const std::string ppg = slurp(dir / "ppg.csv");
        EXPECT(ppg.rfind("t,raw,filtered", 0) == 0, "ppg csv has the documented header");
    }

    // simulate validation runs before any write
    {
        const RunResult sim = run("simulate --out " + d + "/invalid --sbp 80 --dbp 120");
        EXPECT(sim.exit_code == 5, "sbp <= dbp exits 5");
        EXPECT(!fs::exists(dir / "invalid"), "nothing written on invalid input");
    }

    // deterministic analyze output
    {
        const RunResult a = run("analyze " + d + "/s1/manifest.json" + ratio_flags);
        const RunResult b = run("analyze " + d + "/s1/manifest.json" + ratio_flags);
        EXPECT(a.output == b.output, "analyze output is deterministic");
    }

    std::cout << (failures == 0 ? "all cli tests passed\n"
                                : std::to_string(failures) + " cli tests failed\n");
    return failures == 0 ? 0 : 1;
}
