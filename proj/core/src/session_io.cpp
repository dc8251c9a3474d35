#include "bpclip/session_io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace bpclip {

namespace {

[[noreturn]] void io_fail(const fs::path& path, const std::string& what) {
    throw Error(errc::io_error, path.string() + ": " + what);
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) io_fail(path, "cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) io_fail(path, "cannot open for writing");
    out << text;
    if (!out) io_fail(path, "write failed");
}

json parse_json(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        throw Error(errc::bad_format, std::string("malformed JSON in ") + what);
    }
    return j;
}

double require_number(const json& j, const char* key, const char* what) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw Error(errc::bad_format, std::string(what) + " missing numeric field '" + key + "'");
    }
    return j[key].get<double>();
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace

// ---- PGM -------------------------------------------------------------------

void write_pgm(const fs::path& path, const Frame& frame) {
    frame.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) io_fail(path, "cannot open for writing");
    out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels.data()),
              static_cast<std::streamsize>(frame.pixels.size()));
    if (!out) io_fail(path, "write failed");
}

Frame read_pgm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) io_fail(path, "cannot open");

    auto next_token = [&]() -> std::string {
        std::string tok;
        int c = in.get();
        while (c != EOF) {
            if (c == '#') { // comment to end of line
                while (c != EOF && c != '\n') c = in.get();
            } else if (std::isspace(c)) {
                c = in.get();
            } else {
                break;
            }
        }
        while (c != EOF && !std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            c = in.get();
        }
        return tok;
    };

    if (next_token() != "P5") {
        throw Error(errc::bad_format, path.string() + ": not a binary PGM (P5)");
    }
    Frame f;
    try {
        f.width = std::stoi(next_token());
        f.height = std::stoi(next_token());
        const int maxval = std::stoi(next_token());
        if (maxval != 255) {
            throw Error(errc::bad_format, path.string() + ": only maxval 255 supported");
        }
    } catch (const std::logic_error&) {
        throw Error(errc::bad_format, path.string() + ": malformed PGM header");
    }
    if (f.width <= 0 || f.height <= 0) {
        throw Error(errc::bad_format, path.string() + ": non-positive dimensions");
    }
    f.pixels.resize(static_cast<std::size_t>(f.width) * static_cast<std::size_t>(f.height));
    in.read(reinterpret_cast<char*>(f.pixels.data()),
            static_cast<std::streamsize>(f.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(f.pixels.size())) {
        throw Error(errc::bad_format, path.string() + ": truncated pixel data");
    }
    return f;
}

std::string frame_filename(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%06d.pgm", index);
    return buf;
}

std::vector<Frame> read_frame_dir(const fs::path& dir, double frame_rate) {
    if (!fs::is_directory(dir)) io_fail(dir, "not a directory");
    if (!(frame_rate > 0.0)) throw Error(errc::bad_format, "frame_rate must be positive");
    std::vector<Frame> frames;
    for (int i = 0;; ++i) {
        const fs::path p = dir / frame_filename(i);
        if (!fs::exists(p)) break;
        Frame f = read_pgm(p);
        f.timestamp = static_cast<double>(i) / frame_rate;
        frames.push_back(std::move(f));
    }
    if (frames.empty()) io_fail(dir, "no frame_000000.pgm found");
    return frames;
}

// ---- Series CSV --------------------------------------------------------------

void write_series_csv(const fs::path& path, const std::vector<PressureSample>& samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) io_fail(path, "cannot open for writing");
    out << "t,pressure_mmhg,brightness,diameter_px\n";
    for (const PressureSample& s : samples) {
        out << fixed6(s.t) << ',' << fixed6(s.pressure) << ',' << fixed6(s.brightness) << ','
            << fixed6(s.diameter_px) << '\n';
    }
    if (!out) io_fail(path, "write failed");
}

std::vector<PressureSample> read_series_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) io_fail(path, "cannot open");
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,pressure_mmhg,brightness,diameter_px", 0) != 0) {
        throw Error(errc::bad_format, path.string() + ": unexpected CSV header");
    }
    std::vector<PressureSample> samples;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        PressureSample s;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &s.t, &s.pressure, &s.brightness,
                        &s.diameter_px) != 4) {
            throw Error(errc::bad_format,
                        path.string() + ": bad row at line " + std::to_string(lineno));
        }
        samples.push_back(s);
    }
    if (samples.empty()) {
        throw Error(errc::bad_format, path.string() + ": no samples");
    }
    return samples;
}

// ---- Device profiles -----------------------------------------------------------

std::string profile_to_json(const DeviceProfile& profile, const std::string& phone_model) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["spring_constant_k"] = profile.spring_constant_k;
    j["rest_distance_z0"] = profile.rest_distance_z0;
    j["pinhole_diameter_a"] = profile.pinhole_diameter_a;
    j["focal_length_f"] = profile.focal_length_f;
    j["contact_area_A"] = profile.contact_area_A;
    j["flash_cam_distance"] = profile.flash_cam_distance;
    j["attenuation_coeff"] = profile.attenuation_coeff;
    j["preload_force"] = profile.preload_force;
    if (!phone_model.empty()) j["phone_model"] = phone_model;
    return j.dump(2) + "\n";
}

DeviceProfile profile_from_json(const std::string& text) {
    const json j = parse_json(text, "device profile");
    DeviceProfile p;
    p.spring_constant_k = require_number(j, "spring_constant_k", "profile");
    p.rest_distance_z0 = require_number(j, "rest_distance_z0", "profile");
    p.pinhole_diameter_a = require_number(j, "pinhole_diameter_a", "profile");
    p.focal_length_f = require_number(j, "focal_length_f", "profile");
    p.contact_area_A = require_number(j, "contact_area_A", "profile");
    p.flash_cam_distance = require_number(j, "flash_cam_distance", "profile");
    p.attenuation_coeff = require_number(j, "attenuation_coeff", "profile");
    if (j.contains("preload_force")) p.preload_force = j["preload_force"].get<double>();
    p.validate();
    return p;
}

void save_profile(const fs::path& path, const DeviceProfile& profile,
                  const std::string& phone_model) {
    write_text_file(path, profile_to_json(profile, phone_model));
}

DeviceProfile load_profile(const fs::path& path) {
    return profile_from_json(read_text_file(path));
}

DeviceProfile find_profile_by_phone_model(const fs::path& registry_dir,
                                          const std::string& phone_model) {
    if (!fs::is_directory(registry_dir)) io_fail(registry_dir, "registry is not a directory");
    std::vector<fs::path> entries;
    for (const auto& entry : fs::directory_iterator(registry_dir)) {
        if (entry.path().extension() == ".json") entries.push_back(entry.path());
    }
    std::sort(entries.begin(), entries.end());
    for (const fs::path& p : entries) {
        const json j = parse_json(read_text_file(p), "registry profile");
        if (j.contains("phone_model") && j["phone_model"] == phone_model) {
            return profile_from_json(read_text_file(p));
        }
    }
    throw Error(errc::unknown_phone_model, "no registry entry for '" + phone_model + "'");
}

// ---- Manifests -------------------------------------------------------------------

const char* to_string(CaptureMode m) noexcept {
    return m == CaptureMode::frames ? "frames" : "series";
}

namespace {

json protocol_to_json(const SessionConfig& c) {
    json j;
    j["n_levels"] = c.n_levels;
    j["pressure_targets"] = c.pressure_targets;
    j["hold_tolerance"] = c.hold_tolerance;
    j["dwell_seconds"] = c.dwell_seconds;
    j["readings_per_level"] = c.readings_per_level;
    j["max_attempts_first_level"] = c.max_attempts_first_level;
    j["max_attempts_other"] = c.max_attempts_other;
    j["reach_timeout_seconds"] = c.reach_timeout_seconds;
    return j;
}

SessionConfig protocol_from_json(const json& j) {
    SessionConfig c;
    c.n_levels = static_cast<int>(require_number(j, "n_levels", "protocol"));
    if (!j.contains("pressure_targets") || !j["pressure_targets"].is_array()) {
        throw Error(errc::bad_format, "protocol missing pressure_targets array");
    }
    c.pressure_targets = j["pressure_targets"].get<std::vector<double>>();
    c.hold_tolerance = require_number(j, "hold_tolerance", "protocol");
    c.dwell_seconds = require_number(j, "dwell_seconds", "protocol");
    c.readings_per_level = static_cast<int>(require_number(j, "readings_per_level", "protocol"));
    c.max_attempts_first_level =
        static_cast<int>(require_number(j, "max_attempts_first_level", "protocol"));
    c.max_attempts_other = static_cast<int>(require_number(j, "max_attempts_other", "protocol"));
    c.reach_timeout_seconds = require_number(j, "reach_timeout_seconds", "protocol");
    c.validate();
    return c;
}

} // namespace

std::string manifest_to_json(const SessionManifest& m) {
    json j;
    j["schema_version"] = m.schema_version;
    j["profile"] = m.profile_path;
    j["mode"] = to_string(m.mode);
    if (m.mode == CaptureMode::frames) j["frames_dir"] = m.frames_dir;
    if (m.mode == CaptureMode::series) j["series_file"] = m.series_file;
    j["frame_rate"] = m.frame_rate;
    j["protocol"] = protocol_to_json(m.protocol);
    j["metadata"] = m.metadata;
    return j.dump(2) + "\n";
}

SessionManifest manifest_from_json(const std::string& text) {
    const json j = parse_json(text, "session manifest");
    SessionManifest m;
    m.schema_version = static_cast<int>(require_number(j, "schema_version", "manifest"));
    if (m.schema_version != kSchemaVersion) {
        throw Error(errc::bad_format,
                    "unsupported schema_version " + std::to_string(m.schema_version));
    }
    if (!j.contains("profile") || !j["profile"].is_string()) {
        throw Error(errc::bad_format, "manifest missing 'profile'");
    }
    m.profile_path = j["profile"].get<std::string>();
    const std::string mode = j.value("mode", "");
    if (mode == "frames") {
        m.mode = CaptureMode::frames;
        m.frames_dir = j.value("frames_dir", "");
        if (m.frames_dir.empty()) throw Error(errc::bad_format, "frames mode needs 'frames_dir'");
    } else if (mode == "series") {
        m.mode = CaptureMode::series;
        m.series_file = j.value("series_file", "");
        if (m.series_file.empty()) throw Error(errc::bad_format, "series mode needs 'series_file'");
    } else {
        throw Error(errc::bad_format, "mode must be 'frames' or 'series'");
    }
    m.frame_rate = require_number(j, "frame_rate", "manifest");
    if (!j.contains("protocol")) throw Error(errc::bad_format, "manifest missing 'protocol'");
    m.protocol = protocol_from_json(j["protocol"]);
    if (j.contains("metadata")) {
        for (const auto& [key, value] : j["metadata"].items()) {
            m.metadata[key] = value.is_string() ? value.get<std::string>() : value.dump();
        }
    }
    return m;
}

void save_manifest(const fs::path& path, const SessionManifest& manifest) {
    write_text_file(path, manifest_to_json(manifest));
}

SessionManifest load_manifest(const fs::path& path) {
    return manifest_from_json(read_text_file(path));
}

// ---- Regression models --------------------------------------------------------------

std::string model_to_json(const RegressionModel& m) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["features"] = m.features;
    j["means"] = m.means;
    j["scales"] = m.scales;
    j["systolic"] = {{"coefficients", m.systolic.coefficients}, {"intercept", m.systolic.intercept}};
    j["diastolic"] = {{"coefficients", m.diastolic.coefficients},
                      {"intercept", m.diastolic.intercept}};
    j["metadata"] = m.metadata;
    return j.dump(2) + "\n";
}

RegressionModel model_from_json(const std::string& text) {
    const json j = parse_json(text, "regression model");
    RegressionModel m;
    try {
        m.features = j.at("features").get<std::vector<std::string>>();
        m.means = j.at("means").get<std::vector<double>>();
        m.scales = j.at("scales").get<std::vector<double>>();
        m.systolic.coefficients = j.at("systolic").at("coefficients").get<std::vector<double>>();
        m.systolic.intercept = j.at("systolic").at("intercept").get<double>();
        m.diastolic.coefficients = j.at("diastolic").at("coefficients").get<std::vector<double>>();
        m.diastolic.intercept = j.at("diastolic").at("intercept").get<double>();
        if (j.contains("metadata")) {
            for (const auto& [key, value] : j["metadata"].items()) {
                m.metadata[key] = value.is_string() ? value.get<std::string>() : value.dump();
            }
        }
    } catch (const json::exception& e) {
        throw Error(errc::bad_format, std::string("regression model: ") + e.what());
    }
    return m;
}

void save_model(const fs::path& path, const RegressionModel& model) {
    write_text_file(path, model_to_json(model));
}

RegressionModel load_model(const fs::path& path) {
    return model_from_json(read_text_file(path));
}

// ---- Oscillogram artifacts --------------------------------------------------------

void write_envelope_csv(const fs::path& path, const Oscillogram& oscillogram) {
    std::ofstream out(path, std::ios::binary);
    if (!out) io_fail(path, "cannot open for writing");
    out << "pressure_mmHg,amplitude,n_beats\n";
    for (const auto& p : oscillogram.points) {
        out << fixed6(p.pressure) << ',' << fixed6(p.amplitude) << ',' << p.n_beats << '\n';
    }
    if (!out) io_fail(path, "write failed");
}

Oscillogram read_envelope_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) io_fail(path, "cannot open");
    std::string line;
    if (!std::getline(in, line) || line.rfind("pressure_mmHg,amplitude,n_beats", 0) != 0) {
        throw Error(errc::bad_format, path.string() + ": unexpected CSV header");
    }
    Oscillogram o;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        OscillogramPoint p;
        if (std::sscanf(line.c_str(), "%lf,%lf,%d", &p.pressure, &p.amplitude, &p.n_beats) != 3) {
            throw Error(errc::bad_format, path.string() + ": bad row");
        }
        p.quality = SignalQuality::good;
        o.points.push_back(p);
    }
    return o;
}

void write_envelope_svg(const fs::path& path, const Oscillogram& oscillogram,
                        const EnvelopeFit& fit) {
    constexpr int width = 640, height = 420;
    constexpr double ml = 60, mr = 20, mt = 30, mb = 50;
    const double plot_w = width - ml - mr;
    const double plot_h = height - mt - mb;

    double p_lo = oscillogram.points.front().pressure;
    double p_hi = oscillogram.points.back().pressure;
    const double pad = 0.08 * (p_hi - p_lo);
    p_lo -= pad;
    p_hi += pad;
    double a_hi = fit.a_max;
    for (const auto& p : oscillogram.points) a_hi = std::max(a_hi, p.amplitude);
    a_hi *= 1.1;

    auto sx = [&](double p) { return ml + (p - p_lo) / (p_hi - p_lo) * plot_w; };
    auto sy = [&](double a) { return mt + plot_h - a / a_hi * plot_h; };
    auto f2 = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return std::string(buf);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">"
        << "pulse amplitude vs applied pressure</text>\n";
    // axes
    svg << "<line x1=\"" << f2(ml) << "\" y1=\"" << f2(mt + plot_h) << "\" x2=\"" << f2(ml + plot_w)
        << "\" y2=\"" << f2(mt + plot_h) << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << f2(ml) << "\" y1=\"" << f2(mt) << "\" x2=\"" << f2(ml) << "\" y2=\""
        << f2(mt + plot_h) << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 5; ++k) {
        const double p = p_lo + (p_hi - p_lo) * k / 5.0;
        svg << "<text x=\"" << f2(sx(p)) << "\" y=\"" << f2(mt + plot_h + 18)
            << "\" text-anchor=\"middle\" font-size=\"10\">" << f2(p) << "</text>\n";
        const double a = a_hi * k / 5.0;
        svg << "<text x=\"" << f2(ml - 6) << "\" y=\"" << f2(sy(a) + 3)
            << "\" text-anchor=\"end\" font-size=\"10\">" << f2(a) << "</text>\n";
    }
    svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"11\">applied pressure (mmHg)</text>\n";
    // fitted curve
    svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (int k = 0; k <= 200; ++k) {
        const double p = p_lo + (p_hi - p_lo) * k / 200.0;
        svg << f2(sx(p)) << ',' << f2(sy(envelope_value(fit, p))) << ' ';
    }
    svg << "\"/>\n";
    // observed points
    for (const auto& p : oscillogram.points) {
        svg << "<circle cx=\"" << f2(sx(p.pressure)) << "\" cy=\"" << f2(sy(p.amplitude))
            << "\" r=\"3.5\" fill=\"#d62728\"/>\n";
    }
    svg << "<text x=\"" << f2(ml + 8) << "\" y=\"" << f2(mt + 14) << "\" font-size=\"11\">"
        << "peak " << f2(fit.a_max) << " at " << f2(fit.map) << " mmHg, sigma " << f2(fit.sigma)
        << "</text>\n";
    svg << "</svg>\n";
    write_text_file(path, svg.str());
}

// ---- Session events -------------------------------------------------------------

std::string events_to_jsonl(const std::vector<SessionEvent>& events) {
    std::ostringstream out;
    for (const SessionEvent& e : events) {
        json j;
        j["t"] = e.t;
        j["phase"] = to_string(e.phase);
        j["level"] = e.level;
        j["prompt"] = to_string(e.prompt);
        out << j.dump() << '\n';
    }
    return out.str();
}

void write_events_jsonl(const fs::path& path, const std::vector<SessionEvent>& events) {
    write_text_file(path, events_to_jsonl(events));
}

// ---- PPG debug dump ----------------------------------------------------------------

void write_ppg_csv(const fs::path& path, const std::vector<PressureSample>& samples,
                   const FilteredSeries& filtered) {
    if (samples.size() != filtered.values.size()) {
        throw Error(errc::bad_format, "raw/filtered length mismatch");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) io_fail(path, "cannot open for writing");
    out << "t,raw,filtered\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out << fixed6(samples[i].t) << ',' << fixed6(samples[i].brightness) << ','
            << fixed6(filtered.values[i]) << '\n';
    }
    if (!out) io_fail(path, "write failed");
}

// ---- Synthetic session export --------------------------------------------------------

fs::path export_session(const fs::path& dir, const SyntheticSession& session) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) io_fail(dir, "cannot create directory");

    save_profile(dir / "profile.json", session.profile);

    SessionManifest m;
    m.profile_path = "profile.json";
    m.frame_rate = session.options.fs;
    m.protocol = session.config;
    m.metadata["generator"] = "bpclip simulate";
    m.metadata["seed"] = std::to_string(session.seed);
    m.metadata["label_systolic"] = fixed6(session.subject.true_systolic);
    m.metadata["label_diastolic"] = fixed6(session.subject.true_diastolic);
    m.metadata["label_heart_rate_bpm"] = fixed6(session.subject.heart_rate_bpm);
    m.metadata["noise_sd"] = fixed6(session.subject.noise_sd);

    if (session.options.render_frames) {
        m.mode = CaptureMode::frames;
        m.frames_dir = "frames";
        const fs::path frames_dir = dir / "frames";
        fs::create_directories(frames_dir, ec);
        if (ec) io_fail(frames_dir, "cannot create directory");
        for (std::size_t i = 0; i < session.frames.size(); ++i) {
            write_pgm(frames_dir / frame_filename(static_cast<int>(i)), session.frames[i]);
        }
    } else {
        m.mode = CaptureMode::series;
        m.series_file = "series.csv";
        write_series_csv(dir / "series.csv", session.samples);
    }

    const fs::path manifest_path = dir / "manifest.json";
    save_manifest(manifest_path, m);
    return manifest_path;
}

// ---- Minimal JSON Schema check ----------------------------------------------------------

namespace {

bool type_matches(const json& instance, const std::string& type) {
    if (type == "object") return instance.is_object();
    if (type == "array") return instance.is_array();
    if (type == "string") return instance.is_string();
    if (type == "number") return instance.is_number();
    if (type == "integer") return instance.is_number_integer();
    if (type == "boolean") return instance.is_boolean();
    if (type == "null") return instance.is_null();
    return false;
}

void check_schema(const json& schema, const json& instance, const std::string& where,
                  std::vector<std::string>& out) {
    if (schema.contains("type")) {
        const std::string type = schema["type"].get<std::string>();
        if (!type_matches(instance, type)) {
            out.push_back(where + ": expected " + type);
            return;
        }
    }
    if (schema.contains("enum")) {
        bool found = false;
        for (const auto& v : schema["enum"]) {
            if (v == instance) found = true;
        }
        if (!found) out.push_back(where + ": value not in enum");
    }
    if (instance.is_object()) {
        if (schema.contains("required")) {
            for (const auto& key : schema["required"]) {
                if (!instance.contains(key.get<std::string>())) {
                    out.push_back(where + ": missing required '" + key.get<std::string>() + "'");
                }
            }
        }
        const bool closed =
            schema.contains("additionalProperties") && schema["additionalProperties"] == false;
        for (const auto& [key, value] : instance.items()) {
            if (schema.contains("properties") && schema["properties"].contains(key)) {
                check_schema(schema["properties"][key], value, where + "." + key, out);
            } else if (closed) {
                out.push_back(where + ": unexpected property '" + key + "'");
            }
        }
    }
    if (instance.is_array()) {
        if (schema.contains("minItems") &&
            instance.size() < schema["minItems"].get<std::size_t>()) {
            out.push_back(where + ": fewer than minItems");
        }
        if (schema.contains("items")) {
            for (std::size_t i = 0; i < instance.size(); ++i) {
                check_schema(schema["items"], instance[i], where + "[" + std::to_string(i) + "]",
                             out);
            }
        }
    }
}

} // namespace

std::vector<std::string> validate_against_schema(const std::string& schema_text,
                                                 const std::string& instance_text) {
    const json schema = parse_json(schema_text, "schema");
    const json instance = parse_json(instance_text, "instance");
    std::vector<std::string> violations;
    check_schema(schema, instance, "$", violations);
    return violations;
}

} // namespace bpclip
