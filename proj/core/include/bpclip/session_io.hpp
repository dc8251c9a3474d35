#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "bpclip/digital_twin.hpp"
#include "bpclip/frame_analysis.hpp"
#include "bpclip/oscillometry.hpp"
#include "bpclip/session_protocol.hpp"

namespace bpclip {

inline constexpr int kSchemaVersion = 1;

// ---- PGM (P5) frames -------------------------------------------------------

void write_pgm(const std::filesystem::path& path, const Frame& frame);
Frame read_pgm(const std::filesystem::path& path);

/// frame_%06d.pgm name for index i.
std::string frame_filename(int index);

/// Loads frame_000000.pgm, frame_000001.pgm, ... assigning timestamps from
/// the frame rate. Throws IoError when the directory holds no frames.
std::vector<Frame> read_frame_dir(const std::filesystem::path& dir, double frame_rate);

// ---- Sample series CSV ------------------------------------------------------

void write_series_csv(const std::filesystem::path& path, const std::vector<PressureSample>& samples);
std::vector<PressureSample> read_series_csv(const std::filesystem::path& path);

// ---- Device profiles --------------------------------------------------------

std::string profile_to_json(const DeviceProfile& profile, const std::string& phone_model = "");
DeviceProfile profile_from_json(const std::string& text);
void save_profile(const std::filesystem::path& path, const DeviceProfile& profile,
                  const std::string& phone_model = "");
DeviceProfile load_profile(const std::filesystem::path& path);

/// Looks a phone model up in a registry directory of profile JSON files.
/// Throws UnknownPhoneModel when no file carries the requested model string.
DeviceProfile find_profile_by_phone_model(const std::filesystem::path& registry_dir,
                                          const std::string& phone_model);

// ---- Session manifests ------------------------------------------------------

enum class CaptureMode { frames, series };

const char* to_string(CaptureMode m) noexcept;

/// On-disk description of one recorded (or synthesized) session.
struct SessionManifest {
    int schema_version = kSchemaVersion;
    std::string profile_path; ///< relative to the manifest location
    CaptureMode mode = CaptureMode::series;
    std::string frames_dir;   ///< mode == frames
    std::string series_file;  ///< mode == series
    double frame_rate = 30.0;
    SessionConfig protocol{};
    std::map<std::string, std::string> metadata;
};

std::string manifest_to_json(const SessionManifest& manifest);
SessionManifest manifest_from_json(const std::string& text);
void save_manifest(const std::filesystem::path& path, const SessionManifest& manifest);
SessionManifest load_manifest(const std::filesystem::path& path);

// ---- Regression models ------------------------------------------------------

std::string model_to_json(const RegressionModel& model);
RegressionModel model_from_json(const std::string& text);
void save_model(const std::filesystem::path& path, const RegressionModel& model);
RegressionModel load_model(const std::filesystem::path& path);

// ---- Oscillogram artifacts ---------------------------------------------------

void write_envelope_csv(const std::filesystem::path& path, const Oscillogram& oscillogram);
Oscillogram read_envelope_csv(const std::filesystem::path& path);
void write_envelope_svg(const std::filesystem::path& path, const Oscillogram& oscillogram,
                        const EnvelopeFit& fit);

// ---- Session event log -------------------------------------------------------

/// One JSON object per line: {"t":..,"phase":..,"level":..,"prompt":..}.
std::string events_to_jsonl(const std::vector<SessionEvent>& events);
void write_events_jsonl(const std::filesystem::path& path, const std::vector<SessionEvent>& events);

// ---- PPG debug dump ----------------------------------------------------------

void write_ppg_csv(const std::filesystem::path& path, const std::vector<PressureSample>& samples,
                   const FilteredSeries& filtered);

// ---- Synthetic session export -------------------------------------------------

/// Writes a complete analyzable session directory: profile.json,
/// manifest.json and either frames/ or series.csv. The subject's ground
/// truth lands in manifest metadata (label_systolic / label_diastolic).
/// Returns the manifest path.
std::filesystem::path export_session(const std::filesystem::path& dir,
                                     const SyntheticSession& session);

// ---- Minimal JSON Schema check -------------------------------------------------

/// Validates instance_text against a pragmatic JSON Schema subset (type,
/// properties, required, items, enum, additionalProperties, minItems).
/// Returns human-readable violations; empty means valid.
std::vector<std::string> validate_against_schema(const std::string& schema_text,
                                                 const std::string& instance_text);

} // namespace bpclip
