#include "bpclip/frame_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

namespace bpclip {

void Frame::validate() const {
    if (width < 16 || height < 16) {
        throw Error(errc::invalid_frame, "frame must be at least 16x16");
    }
    if (pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw Error(errc::invalid_frame, "pixel count does not match width*height");
    }
}

const char* to_string(DiscQuality q) noexcept {
    switch (q) {
        case DiscQuality::ok: return "ok";
        case DiscQuality::saturated: return "saturated";
        case DiscQuality::low_contrast: return "low_contrast";
        case DiscQuality::multi_blob: return "multi_blob";
    }
    return "unknown";
}

namespace {

// Bilinear sample with edge clamping.
double sample_bilinear(const Frame& f, double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(f.width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(f.height - 1));
    const int x0 = static_cast<int>(x);
    const int y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, f.width - 1);
    const int y1 = std::min(y0 + 1, f.height - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = (1.0 - fx) * f.at(x0, y0) + fx * f.at(x1, y0);
    const double bot = (1.0 - fx) * f.at(x0, y1) + fx * f.at(x1, y1);
    return (1.0 - fy) * top + fy * bot;
}

double lowest_decile_median(const Frame& f) {
    std::size_t hist[256] = {};
    for (std::uint8_t v : f.pixels) ++hist[v];
    const std::size_t n = f.pixels.size();
    const std::size_t decile = std::max<std::size_t>(1, n / 10);
    // median of the `decile` smallest pixels = value at rank decile/2
    std::size_t rank = decile / 2;
    std::size_t seen = 0;
    for (int v = 0; v < 256; ++v) {
        seen += hist[v];
        if (seen > rank) return static_cast<double>(v);
    }
    return 255.0;
}

struct Component {
    std::vector<std::uint32_t> pixels; // linear indices
    double sum_x = 0.0, sum_y = 0.0;
    bool touches_border = false;
    std::size_t saturated = 0;
};

// Connected components (4-neighbourhood) over the thresholded mask,
// visiting only pixels above threshold.
std::vector<Component> bright_components(const Frame& f, double threshold) {
    const int w = f.width;
    const int h = f.height;
    std::vector<std::uint8_t> state(f.pixels.size(), 0); // 0 dark, 1 bright, 2 visited
    bool any = false;
    for (std::size_t i = 0; i < f.pixels.size(); ++i) {
        if (f.pixels[i] > threshold) {
            state[i] = 1;
            any = true;
        }
    }
    std::vector<Component> comps;
    if (!any) return comps;

    std::vector<std::uint32_t> stack;
    for (std::size_t seed = 0; seed < state.size(); ++seed) {
        if (state[seed] != 1) continue;
        Component c;
        stack.clear();
        stack.push_back(static_cast<std::uint32_t>(seed));
        state[seed] = 2;
        while (!stack.empty()) {
            const std::uint32_t idx = stack.back();
            stack.pop_back();
            c.pixels.push_back(idx);
            const int x = static_cast<int>(idx % static_cast<std::uint32_t>(w));
            const int y = static_cast<int>(idx / static_cast<std::uint32_t>(w));
            c.sum_x += x;
            c.sum_y += y;
            if (x == 0 || y == 0 || x == w - 1 || y == h - 1) c.touches_border = true;
            if (f.pixels[idx] == 255) ++c.saturated;
            const int nx[4] = {x - 1, x + 1, x, x};
            const int ny[4] = {y, y, y - 1, y + 1};
            for (int k = 0; k < 4; ++k) {
                if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
                const std::uint32_t ni =
                    static_cast<std::uint32_t>(ny[k]) * static_cast<std::uint32_t>(w) +
                    static_cast<std::uint32_t>(nx[k]);
                if (state[ni] == 1) {
                    state[ni] = 2;
                    stack.push_back(ni);
                }
            }
        }
        comps.push_back(std::move(c));
    }
    std::sort(comps.begin(), comps.end(),
              [](const Component& a, const Component& b) { return a.pixels.size() > b.pixels.size(); });
    return comps;
}

// Outward march along one ray; returns the sub-pixel radius where the profile
// first drops through `level`, or -1 when it never does within max_r.
double half_crossing_radius(const Frame& f, double cx, double cy, double angle, double level,
                            double max_r) {
    const double dx = std::cos(angle);
    const double dy = std::sin(angle);
    const double step = 0.25;
    double prev_v = sample_bilinear(f, cx, cy);
    double prev_r = 0.0;
    for (double r = step; r <= max_r; r += step) {
        const double v = sample_bilinear(f, cx + r * dx, cy + r * dy);
        if (prev_v >= level && v < level) {
            const double frac = (prev_v - level) / (prev_v - v);
            return prev_r + frac * (r - prev_r);
        }
        prev_v = v;
        prev_r = r;
    }
    return -1.0;
}

} // namespace

CircleObservation detect_circle(const Frame& frame, const DetectParams& params) {
    frame.validate();

    const double background = lowest_decile_median(frame);
    const double max_v = *std::max_element(frame.pixels.begin(), frame.pixels.end());
    const double contrast = max_v - background;
    const double threshold = background + params.contrast_fraction * contrast;

    auto comps = bright_components(frame, threshold);
    if (comps.empty()) {
        // A blown-out frame has no structure above threshold either; tell the
        // two apart by how much of it sits at full scale.
        std::size_t full = 0;
        for (std::uint8_t v : frame.pixels) full += (v == 255);
        if (full >= frame.pixels.size() / 20) {
            throw Error(errc::saturated, "frame saturated end to end");
        }
        throw Error(errc::no_projection, "no component above threshold " + std::to_string(threshold));
    }

    const Component& disc = comps.front();
    if (disc.touches_border) {
        throw Error(errc::disc_clipped, "projection touches the frame border");
    }

    const double area = static_cast<double>(disc.pixels.size());
    const double cx = disc.sum_x / area;
    const double cy = disc.sum_y / area;
    const double seed_radius = std::sqrt(area / std::numbers::pi);

    // Robust interior level: median over component pixels.
    std::vector<std::uint8_t> values;
    values.reserve(disc.pixels.size());
    for (std::uint32_t idx : disc.pixels) values.push_back(frame.pixels[idx]);
    std::nth_element(values.begin(), values.begin() + values.size() / 2, values.end());
    const double disc_level = values[values.size() / 2];
    const double half_level = background + 0.5 * (disc_level - background);

    const int rays = std::max(params.rays, 16);
    const double max_r = 2.0 * seed_radius + 4.0;
    double radius_sum = 0.0;
    int radius_n = 0;
    for (int k = 0; k < rays; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / rays;
        const double r = half_crossing_radius(frame, cx, cy, angle, half_level, max_r);
        if (r > 0.0) {
            radius_sum += r;
            ++radius_n;
        }
    }
    const double radius = radius_n > 0 ? radius_sum / radius_n : seed_radius;

    CircleObservation obs;
    obs.center_x = cx;
    obs.center_y = cy;
    obs.diameter_px = 2.0 * radius;

    // Mean interior brightness, strictly inside interior_fraction * radius.
    const double r_in = params.interior_fraction * radius;
    const int x_lo = std::max(0, static_cast<int>(std::floor(cx - r_in)));
    const int x_hi = std::min(frame.width - 1, static_cast<int>(std::ceil(cx + r_in)));
    const int y_lo = std::max(0, static_cast<int>(std::floor(cy - r_in)));
    const int y_hi = std::min(frame.height - 1, static_cast<int>(std::ceil(cy + r_in)));
    double sum = 0.0;
    std::size_t count = 0;
    for (int y = y_lo; y <= y_hi; ++y) {
        for (int x = x_lo; x <= x_hi; ++x) {
            const double ddx = x - cx;
            const double ddy = y - cy;
            if (ddx * ddx + ddy * ddy < r_in * r_in) {
                sum += frame.at(x, y);
                ++count;
            }
        }
    }
    obs.mean_brightness = count > 0 ? sum / static_cast<double>(count) : disc_level;

    if (static_cast<double>(disc.saturated) >= params.saturation_fraction * area) {
        obs.quality = DiscQuality::saturated;
    } else if (comps.size() > 1 && static_cast<double>(comps[1].pixels.size()) >
                                       params.secondary_blob_fraction * area) {
        obs.quality = DiscQuality::multi_blob;
    } else if (contrast < params.min_contrast) {
        obs.quality = DiscQuality::low_contrast;
    } else {
        obs.quality = DiscQuality::ok;
    }
    return obs;
}

SampleExtraction frames_to_samples(const std::vector<Frame>& frames, const DeviceProfile& profile,
                                   const DetectParams& params) {
    SampleExtraction out;
    out.frames_total = static_cast<int>(frames.size());
    for (const Frame& frame : frames) {
        try {
            const CircleObservation obs = detect_circle(frame, params);
            if (obs.quality != DiscQuality::ok) {
                ++out.frames_dropped;
                continue;
            }
            PressureSample s;
            s.t = frame.timestamp;
            s.diameter_px = obs.diameter_px;
            s.brightness = obs.mean_brightness;
            s.pressure = pressure_from_diameter(obs.diameter_px, profile);
            out.samples.push_back(s);
        } catch (const Error&) {
            ++out.frames_dropped;
        }
    }
    if (out.frames_total > 0 && out.frames_dropped * 2 > out.frames_total) {
        throw Error(errc::empty_output, std::to_string(out.frames_dropped) + " of " +
                                            std::to_string(out.frames_total) + " frames dropped");
    }
    return out;
}

} // namespace bpclip
