#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "bpclip/pipeline.hpp"
#include "test_util.hpp"

using namespace bpclip;
using namespace bpclip::test;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("pipeline");

namespace {

SyntheticSession default_session(std::uint64_t seed = 12, int fail_at_level = -1) {
    const SyntheticSubject subject = make_subject(124.0, 82.0, 68.0);
    SimulationOptions options;
    options.fail_at_level = fail_at_level;
    return simulate_session(subject, DeviceProfile{}, SessionConfig{}, options, seed);
}

} // namespace

TEST_CASE("in-process analysis matches the exported-manifest path") {
    const SyntheticSession session = default_session();
    AnalyzeOptions options;
    options.ratios = matched_ratios();

    const fs::path dir = fs::temp_directory_path() / "bpclip_pipeline_test";
    fs::remove_all(dir);
    const fs::path manifest = export_session(dir, session);

    // same inputs, two routes: manifest loader vs. hand-loaded samples
    const AnalysisResult via_manifest = analyze_manifest(manifest, options);
    AnalysisResult direct = analyze_samples(read_series_csv(dir / "series.csv"),
                                            load_profile(dir / "profile.json"),
                                            load_manifest(manifest).protocol, options);
    direct.frames_total = static_cast<int>(read_series_csv(dir / "series.csv").size());
    CHECK(analysis_to_json(direct) == analysis_to_json(via_manifest));

    // the 1e-6 series quantization does not move the estimate materially
    const AnalysisResult in_memory =
        analyze_samples(session.samples, session.profile, session.config, options);
    CHECK(near_abs(in_memory.estimate.systolic, via_manifest.estimate.systolic, 0.01));
    CHECK(near_abs(in_memory.estimate.diastolic, via_manifest.estimate.diastolic, 0.01));
}

TEST_CASE("aborted session carries its reason") {
    const SyntheticSession session = default_session(13, 0);
    try {
        analyze_samples(session.samples, session.profile, session.config, {});
        FAIL("expected SessionAborted");
    } catch (const Error& e) {
        CHECK(e.code() == errc::session_aborted);
        CHECK(std::string(e.what()).find("first_level_failure") != std::string::npos);
    }
}

TEST_CASE("stream that ends mid-session is reported as incomplete") {
    const SyntheticSession session = default_session();
    std::vector<PressureSample> truncated(session.samples.begin(),
                                          session.samples.begin() + 400);
    try {
        analyze_samples(truncated, session.profile, session.config, {});
        FAIL("expected SessionAborted");
    } catch (const Error& e) {
        CHECK(e.code() == errc::session_aborted);
        CHECK(std::string(e.what()).find("incomplete_stream") != std::string::npos);
    }
}

TEST_CASE("analysis json validates against the shipped schema") {
    const SyntheticSession session = default_session();
    AnalyzeOptions options;
    options.ratios = matched_ratios();
    const AnalysisResult r =
        analyze_samples(session.samples, session.profile, session.config, options);
    std::ifstream schema(fs::path(BPCLIP_SCHEMA_DIR) / "estimate.schema.json");
    const std::string schema_text{std::istreambuf_iterator<char>(schema),
                                  std::istreambuf_iterator<char>()};
    const auto violations = validate_against_schema(schema_text, analysis_to_json(r));
    for (const std::string& v : violations) MESSAGE(v);
    CHECK(violations.empty());
}

TEST_CASE("regression back-end flows through analyze") {
    const SyntheticSession session = default_session();
    // handcrafted identity model that mirrors the matched-ratio decode
    RegressionModel model;
    model.features = regression_feature_names();
    model.means.assign(model.features.size(), 0.0);
    model.scales.assign(model.features.size(), 1.0);
    model.systolic.coefficients.assign(model.features.size(), 0.0);
    model.diastolic.coefficients.assign(model.features.size(), 0.0);
    const FixedRatios r = matched_ratios();
    model.systolic.coefficients[0] = 1.0;
    model.systolic.coefficients[1] = std::sqrt(2.0 * std::log(1.0 / r.systolic));
    model.diastolic.coefficients[0] = 1.0;
    model.diastolic.coefficients[1] = -std::sqrt(2.0 * std::log(1.0 / r.diastolic));

    AnalyzeOptions options;
    options.model = model;
    const AnalysisResult result =
        analyze_samples(session.samples, session.profile, session.config, options);
    CHECK(result.estimate.method == EstimationMethod::regression);
    CHECK(near_abs(result.estimate.systolic, 124.0, 2.0));
    CHECK(near_abs(result.estimate.diastolic, 82.0, 2.0));
}

TEST_SUITE_END();
