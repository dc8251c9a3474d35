#pragma once

#include <utility>
#include <vector>

#include "bpclip/errors.hpp"

namespace bpclip {

/// 1 mmHg in pascal.
inline constexpr double kPascalPerMmHg = 133.322;

/// Largest flashlight-to-camera separation the light guide supports (mm).
inline constexpr double kMaxFlashCamDistanceMm = 16.0;

/// Slack past the rest distance tolerated before a frame is rejected as
/// out of travel. Absorbs detection jitter on frames taken at (or near)
/// zero press, where the computed distance can land slightly above z0.
inline constexpr double kRestToleranceFraction = 0.02;

/// Physical constants of one clip + phone pairing. All lengths in mm,
/// forces in N, the focal length in pixels. Values below are reference
/// prototype constants; every deployment overrides them from a profile
/// file, the operations never assume them.
struct DeviceProfile {
    double spring_constant_k = 0.5;   ///< N per mm of compression
    double rest_distance_z0 = 12.0;   ///< pinhole-to-camera distance at zero press
    double pinhole_diameter_a = 1.0;  ///< physical aperture diameter
    double focal_length_f = 1000.0;   ///< camera focal length, pixels
    double contact_area_A = 100.0;    ///< fingertip contact area, mm^2
    double flash_cam_distance = 12.0; ///< flashlight-to-camera separation
    double attenuation_coeff = 0.02;  ///< light-budget loss per mm of guide length
    double preload_force = 0.0;       ///< optional spring preload, N

    /// Throws errc::invalid_profile when a field violates its range.
    void validate() const;

    /// Projection constant f*a (px*mm); only this product enters the optics.
    double projection_constant() const { return focal_length_f * pinhole_diameter_a; }

    /// Disc diameter observed at zero press.
    double rest_diameter_px() const { return projection_constant() / rest_distance_z0; }
};

/// Timestamped pipeline sample: applied pressure plus the raw optical
/// observables it was derived from.
struct PressureSample {
    double t = 0.0;           ///< seconds since session start
    double pressure = 0.0;    ///< applied pressure, mmHg
    double brightness = 0.0;  ///< mean disc intensity, 0-255
    double diameter_px = 0.0; ///< observed disc diameter, pixels
};

/// Pinhole-to-camera distance from the observed projection diameter,
/// z = f*a / d. Strictly decreasing in d.
double projection_to_distance(double diameter_px, const DeviceProfile& profile);

/// Inverse of projection_to_distance: d = f*a / z.
double distance_to_projection(double z_mm, const DeviceProfile& profile);

/// Spring force at pinhole distance z: F = k*(z0 - z) plus preload when
/// compressed. Zero at and slightly past rest (within the rest tolerance).
double distance_to_force(double z_mm, const DeviceProfile& profile);

/// Applied arterial pressure in mmHg for a fingertip force F over the
/// profile's contact area.
double force_to_pressure(double force_n, const DeviceProfile& profile);

/// Composition diameter -> distance -> force -> pressure. Strictly
/// increasing in diameter over the valid travel range.
double pressure_from_diameter(double diameter_px, const DeviceProfile& profile);

/// Inverse transduction used by the simulator: the pinhole distance at
/// which the clip applies the given pressure.
double pressure_to_distance(double pressure_mmhg, const DeviceProfile& profile);

/// True when a phone's flashlight-to-camera distance is within the light
/// guide's supported range (inclusive at the boundary).
bool check_phone_compatibility(double flash_cam_distance_mm);

/// Fraction of source light that survives the guide.
double light_transmission(const DeviceProfile& profile);

struct CalibrationFit {
    double projection_constant = 0.0; ///< fitted f*a product, px*mm
    double rms_residual = 0.0;        ///< RMS diameter residual, pixels
};

/// Least-squares fit of C in d = C/z from bench observations of
/// (known distance z, measured diameter d). Needs at least two
/// observations at distinct distances.
CalibrationFit calibrate_profile(const std::vector<std::pair<double, double>>& z_d_observations);

} // namespace bpclip
