#pragma once

#include <cstdint>
#include <vector>

#include "bpclip/device_model.hpp"

namespace bpclip {

/// One grayscale camera frame, row-major, intensities 0-255.
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;
    double timestamp = 0.0; ///< seconds

    void validate() const; ///< throws errc::invalid_frame
    std::uint8_t at(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(x)];
    }
};

enum class DiscQuality { ok, saturated, low_contrast, multi_blob };

const char* to_string(DiscQuality q) noexcept;

/// Detected pinhole-projection disc for one frame.
struct CircleObservation {
    double center_x = 0.0; ///< pixels, sub-pixel
    double center_y = 0.0;
    double diameter_px = 0.0;
    double mean_brightness = 0.0; ///< 0-255, averaged strictly inside the disc
    DiscQuality quality = DiscQuality::ok;
};

struct DetectParams {
    /// Binarization threshold sits this fraction of the way from the
    /// background level to the frame maximum.
    double contrast_fraction = 0.5;
    /// Below this max-over-background contrast the disc is flagged low_contrast.
    double min_contrast = 20.0;
    /// Radial profiles used for the sub-pixel edge fit.
    int rays = 32;
    /// Disc is flagged saturated when at least this fraction of its pixels hit 255.
    double saturation_fraction = 0.05;
    /// Flag multi_blob when the second component exceeds this fraction of the largest.
    double secondary_blob_fraction = 0.25;
    /// Brightness is averaged over pixels inside this fraction of the radius,
    /// keeping the edge falloff out of the PPG average.
    double interior_fraction = 0.8;
};

/// Locates the bright projection disc and measures its diameter and interior
/// brightness.
///
/// Algorithm: (1) background = median of the lowest-decile pixels, threshold =
/// background + contrast_fraction * (max - background); (2) largest connected
/// component above threshold; (3) seed diameter = equivalent-area diameter
/// 2*sqrt(area/pi) about the component centroid; (4) refined radius = mean
/// half-maximum crossing along `rays` radial profiles, sub-pixel by linear
/// interpolation of bilinear samples.
///
/// Throws NoProjection when nothing rises above threshold, Saturated when the
/// frame is blown out end to end (no recoverable geometry), DiscClipped when
/// the component touches the frame border. A measurable disc with >= 5%
/// saturated pixels or a significant secondary blob is returned with the
/// corresponding quality flag instead.
CircleObservation detect_circle(const Frame& frame, const DetectParams& params = {});

struct SampleExtraction {
    std::vector<PressureSample> samples;
    int frames_total = 0;
    int frames_dropped = 0;
};

/// Runs detection + transduction over a time-ordered frame stream. Frames
/// whose detection fails or is flagged are dropped and counted; throws
/// EmptyOutput when more than half the stream drops.
SampleExtraction frames_to_samples(const std::vector<Frame>& frames, const DeviceProfile& profile,
                                   const DetectParams& params = {});

} // namespace bpclip
