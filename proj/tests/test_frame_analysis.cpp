#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bpclip/digital_twin.hpp"
#include "bpclip/frame_analysis.hpp"
#include "test_util.hpp"

using namespace bpclip;
using namespace bpclip::test;

TEST_SUITE_BEGIN("frame_analysis");

namespace {

// Wide-travel profile so the render tests can place any diameter d = 1000/z.
DeviceProfile render_profile() {
    DeviceProfile p;
    p.rest_distance_z0 = 25.0;
    return p;
}

Frame uniform_frame(int w, int h, std::uint8_t v) {
    Frame f;
    f.width = w;
    f.height = h;
    f.pixels.assign(static_cast<std::size_t>(w) * h, v);
    return f;
}

Frame disc_frame(double diameter_px, double brightness, double cx, double cy, int size = 192) {
    const DeviceProfile p = render_profile();
    return render_frame(1000.0 / diameter_px, brightness, p, size, size, cx, cy);
}

} // namespace

TEST_CASE("dark frame has no projection") {
    const Frame f = uniform_frame(64, 64, 5);
    CHECK(thrown_code([&] { detect_circle(f); }) == errc::no_projection);
}

TEST_CASE("blown-out frame reports saturation") {
    const Frame f = uniform_frame(64, 64, 255);
    CHECK(thrown_code([&] { detect_circle(f); }) == errc::saturated);
}

TEST_CASE("rasterized disc is measured to a pixel") {
    const Frame f = disc_frame(80.0, 200.0, 96.0, 96.0);
    const CircleObservation obs = detect_circle(f);
    CHECK(obs.quality == DiscQuality::ok);
    CHECK(near_abs(obs.diameter_px, 80.0, 1.0));
    CHECK(near_abs(obs.mean_brightness, 200.0, 2.0));
    CHECK(near_abs(obs.center_x, 96.0, 0.5));
    CHECK(near_abs(obs.center_y, 96.0, 0.5));
}

TEST_CASE("detection across random geometry and brightness") {
    TwinRng rng(1234);
    for (int i = 0; i < 40; ++i) {
        const double d = rng.uniform(50.0, 140.0);
        const double b = rng.uniform(60.0, 230.0);
        const double cx = 96.0 + rng.uniform(-6.0, 6.0);
        const double cy = 96.0 + rng.uniform(-6.0, 6.0);
        const Frame f = disc_frame(d, b, cx, cy);
        const CircleObservation obs = detect_circle(f);
        CHECK(near_abs(obs.diameter_px, d, 1.0));
        CHECK(near_abs(obs.mean_brightness, b, 2.0));
    }
}

TEST_CASE("diameter invariant under constant offset up to 20") {
    const Frame base = disc_frame(90.0, 180.0, 96.0, 96.0);
    const CircleObservation ref = detect_circle(base);
    for (int offset : {5, 12, 20}) {
        Frame shifted = base;
        for (auto& v : shifted.pixels) {
            v = static_cast<std::uint8_t>(std::min(255, v + offset));
        }
        const CircleObservation obs = detect_circle(shifted);
        CHECK(near_abs(obs.diameter_px, ref.diameter_px, 1e-6));
    }
}

TEST_CASE("gain scales brightness, not geometry") {
    const Frame base = disc_frame(90.0, 150.0, 96.0, 96.0);
    const CircleObservation ref = detect_circle(base);
    for (double g : {0.5, 0.75, 1.25, 1.5}) {
        Frame gained = base;
        for (std::size_t i = 0; i < gained.pixels.size(); ++i) {
            gained.pixels[i] = static_cast<std::uint8_t>(
                std::lround(std::min(255.0, static_cast<double>(base.pixels[i]) * g)));
        }
        const CircleObservation obs = detect_circle(gained);
        CHECK(near_abs(obs.diameter_px, ref.diameter_px, 0.5));
        CHECK(near_rel(obs.mean_brightness, ref.mean_brightness * g, 0.02));
    }
}

TEST_CASE("translation equivariance") {
    const CircleObservation ref = detect_circle(disc_frame(80.0, 200.0, 90.0, 92.0));
    for (auto [dx, dy] : {std::pair{7, 0}, {0, -5}, {6, 6}, {-8, 3}}) {
        const CircleObservation obs = detect_circle(disc_frame(80.0, 200.0, 90.0 + dx, 92.0 + dy));
        CHECK(near_abs(obs.center_x - ref.center_x, dx, 0.25));
        CHECK(near_abs(obs.center_y - ref.center_y, dy, 0.25));
        CHECK(near_abs(obs.diameter_px, ref.diameter_px, 0.25));
    }
}

TEST_CASE("saturated disc is flagged but measured") {
    const Frame f = disc_frame(80.0, 255.0, 96.0, 96.0);
    const CircleObservation obs = detect_circle(f);
    CHECK(obs.quality == DiscQuality::saturated);
    CHECK(near_abs(obs.diameter_px, 80.0, 1.5));
}

TEST_CASE("secondary blob is flagged, largest still measured") {
    Frame f = disc_frame(80.0, 200.0, 70.0, 96.0);
    // paint a bright square with ~36% of the disc's area near the far edge
    const int side = static_cast<int>(std::sqrt(0.36 * 3.14159 * 40.0 * 40.0));
    for (int y = 120; y < 120 + side; ++y) {
        for (int x = 140; x < 140 + side; ++x) {
            f.pixels[static_cast<std::size_t>(y) * f.width + x] = 200;
        }
    }
    const CircleObservation obs = detect_circle(f);
    CHECK(obs.quality == DiscQuality::multi_blob);
    CHECK(near_abs(obs.diameter_px, 80.0, 1.0));
}

TEST_CASE("low contrast is flagged") {
    const Frame f = disc_frame(80.0, 25.0, 96.0, 96.0); // contrast 15 over background 10
    const CircleObservation obs = detect_circle(f);
    CHECK(obs.quality == DiscQuality::low_contrast);
}

TEST_CASE("disc touching the border is rejected") {
    // crop a centred render so the disc crosses the new right edge
    const Frame big = disc_frame(100.0, 200.0, 96.0, 96.0);
    Frame cropped;
    cropped.width = 120;
    cropped.height = big.height;
    cropped.pixels.resize(static_cast<std::size_t>(cropped.width) * cropped.height);
    for (int y = 0; y < cropped.height; ++y) {
        for (int x = 0; x < cropped.width; ++x) {
            cropped.pixels[static_cast<std::size_t>(y) * cropped.width + x] = big.at(x, y);
        }
    }
    CHECK(thrown_code([&] { detect_circle(cropped); }) == errc::disc_clipped);
}

TEST_CASE("frame validation") {
    Frame f = uniform_frame(8, 8, 0);
    CHECK(thrown_code([&] { f.validate(); }) == errc::invalid_frame);
    f = uniform_frame(32, 32, 0);
    f.pixels.pop_back();
    CHECK(thrown_code([&] { f.validate(); }) == errc::invalid_frame);
}

TEST_CASE("frames_to_samples keeps clean frames and counts drops") {
    const DeviceProfile p = render_profile();
    std::vector<Frame> frames;
    for (int i = 0; i < 300; ++i) {
        Frame f = disc_frame(90.0, 180.0, 96.0, 96.0);
        f.timestamp = i / 30.0;
        frames.push_back(std::move(f));
    }
    const SampleExtraction ex = frames_to_samples(frames, p);
    CHECK(ex.samples.size() == 300);
    CHECK(ex.frames_dropped == 0);
    CHECK(ex.samples.back().t == doctest::Approx(299.0 / 30.0));
    CHECK(ex.samples.front().pressure == ex.samples.back().pressure);

    // a third of the stream dark: dropped but under the 50% limit
    for (int i = 0; i < 100; ++i) frames[static_cast<std::size_t>(i * 3)] = [&] {
        Frame dark = uniform_frame(192, 192, 5);
        dark.timestamp = frames[static_cast<std::size_t>(i * 3)].timestamp;
        return dark;
    }();
    const SampleExtraction partial = frames_to_samples(frames, p);
    CHECK(partial.frames_dropped == 100);
    CHECK(partial.samples.size() == 200);
}

TEST_CASE("mostly-dark stream is rejected") {
    const DeviceProfile p = render_profile();
    std::vector<Frame> frames;
    for (int i = 0; i < 300; ++i) {
        Frame f = i < 100 ? disc_frame(90.0, 180.0, 96.0, 96.0) : uniform_frame(192, 192, 5);
        f.timestamp = i / 30.0;
        frames.push_back(std::move(f));
    }
    CHECK(thrown_code([&] { frames_to_samples(frames, p); }) == errc::empty_output);
}

TEST_CASE("extracted samples match the synthesized session") {
    const SyntheticSubject subject = make_subject(120.0, 80.0, 70.0);
    DeviceProfile profile;
    SessionConfig config;
    SimulationOptions options;
    options.render_frames = true;
    options.fs = 20.0;
    const SyntheticSession session = simulate_session(subject, profile, config, options, 99);

    // spot-check a spread of frames against the ground-truth stream
    const SampleExtraction ex = frames_to_samples(session.frames, profile);
    REQUIRE(ex.samples.size() == session.samples.size());
    for (std::size_t i = 0; i < ex.samples.size(); i += 97) {
        CHECK(near_abs(ex.samples[i].pressure, session.samples[i].pressure, 2.0));
        CHECK(near_abs(ex.samples[i].brightness, session.samples[i].brightness, 2.0));
    }
}

TEST_SUITE_END();
