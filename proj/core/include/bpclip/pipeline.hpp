#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bpclip/session_io.hpp"

namespace bpclip {

struct AnalyzeOptions {
    FixedRatios ratios{};
    std::optional<RegressionModel> model; ///< regression back-end when present
    EnvelopeFitOptions fit_options{};
    DetectParams detect{};
};

/// Everything one measurement produces, ready for serialization.
struct AnalysisResult {
    BpEstimate estimate;
    EnvelopeFit envelope;
    Oscillogram oscillogram;
    std::vector<PulseMetrics> levels;
    int frames_total = 0;
    int frames_dropped = 0;
    std::vector<SessionEvent> events;
};

/// Replays a sample stream through the guided protocol, assembles the
/// oscillogram and decodes blood pressure. Throws SessionAborted (with the
/// abort reason as message) when the protocol gives up, and the usual
/// quality errors further down the chain.
AnalysisResult analyze_samples(const std::vector<PressureSample>& samples,
                               const DeviceProfile& profile, const SessionConfig& config,
                               const AnalyzeOptions& options = {});

/// Frame-stream front end: detection + transduction, then analyze_samples.
AnalysisResult analyze_frames(const std::vector<Frame>& frames, const DeviceProfile& profile,
                              const SessionConfig& config, const AnalyzeOptions& options = {});

/// Loads a session manifest and runs the matching front end.
AnalysisResult analyze_manifest(const std::filesystem::path& manifest_path,
                                const AnalyzeOptions& options = {});

/// Stable JSON document for an analysis (schema: schemas/estimate.schema.json).
std::string analysis_to_json(const AnalysisResult& result);

} // namespace bpclip
