#include "bpclip/device_model.hpp"

#include <cmath>
#include <string>

namespace bpclip {

namespace {

double rest_tolerance_mm(const DeviceProfile& p) {
    return kRestToleranceFraction * p.rest_distance_z0;
}

} // namespace

void DeviceProfile::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw Error(errc::invalid_profile, std::string(name) + " must be strictly positive");
        }
    };
    positive(spring_constant_k, "spring_constant_k");
    positive(rest_distance_z0, "rest_distance_z0");
    positive(pinhole_diameter_a, "pinhole_diameter_a");
    positive(focal_length_f, "focal_length_f");
    positive(contact_area_A, "contact_area_A");
    positive(attenuation_coeff, "attenuation_coeff");
    if (!(flash_cam_distance >= 0.0) || !std::isfinite(flash_cam_distance)) {
        throw Error(errc::invalid_profile, "flash_cam_distance must be >= 0");
    }
    if (!(preload_force >= 0.0) || !std::isfinite(preload_force)) {
        throw Error(errc::invalid_profile, "preload_force must be >= 0");
    }
}

double projection_to_distance(double diameter_px, const DeviceProfile& profile) {
    if (!(diameter_px > 0.0)) {
        throw Error(errc::non_positive_diameter,
                    "diameter " + std::to_string(diameter_px) + " px");
    }
    const double z = profile.projection_constant() / diameter_px;
    if (z > profile.rest_distance_z0 + rest_tolerance_mm(profile)) {
        throw Error(errc::distance_out_of_travel,
                    "z = " + std::to_string(z) + " mm exceeds rest distance " +
                        std::to_string(profile.rest_distance_z0) + " mm");
    }
    return z;
}

double distance_to_projection(double z_mm, const DeviceProfile& profile) {
    if (!(z_mm > 0.0)) {
        throw Error(errc::non_physical_distance, "z = " + std::to_string(z_mm) + " mm");
    }
    return profile.projection_constant() / z_mm;
}

double distance_to_force(double z_mm, const DeviceProfile& profile) {
    if (!(z_mm > 0.0)) {
        throw Error(errc::non_physical_distance, "z = " + std::to_string(z_mm) + " mm");
    }
    const double z0 = profile.rest_distance_z0;
    if (z_mm > z0 + rest_tolerance_mm(profile)) {
        throw Error(errc::distance_exceeds_rest,
                    "z = " + std::to_string(z_mm) + " mm, rest = " + std::to_string(z0) + " mm");
    }
    if (z_mm >= z0) {
        return 0.0; // at rest, or within the jitter tolerance past it
    }
    return profile.spring_constant_k * (z0 - z_mm) + profile.preload_force;
}

double force_to_pressure(double force_n, const DeviceProfile& profile) {
    if (!(force_n >= 0.0)) {
        throw Error(errc::non_physical_distance, "force must be >= 0");
    }
    if (!(profile.contact_area_A > 0.0)) {
        throw Error(errc::invalid_profile, "contact_area_A must be strictly positive");
    }
    // N / mm^2 = 1e6 Pa
    const double pascal = force_n / profile.contact_area_A * 1e6;
    return pascal / kPascalPerMmHg;
}

double pressure_from_diameter(double diameter_px, const DeviceProfile& profile) {
    const double z = projection_to_distance(diameter_px, profile);
    return force_to_pressure(distance_to_force(z, profile), profile);
}

double pressure_to_distance(double pressure_mmhg, const DeviceProfile& profile) {
    if (!(pressure_mmhg >= 0.0)) {
        throw Error(errc::non_physical_distance, "pressure must be >= 0");
    }
    const double force = pressure_mmhg * kPascalPerMmHg * profile.contact_area_A * 1e-6;
    const double spring_force = force > profile.preload_force ? force - profile.preload_force : 0.0;
    const double z = profile.rest_distance_z0 - spring_force / profile.spring_constant_k;
    if (!(z > 0.0)) {
        throw Error(errc::non_physical_distance,
                    "pressure " + std::to_string(pressure_mmhg) + " mmHg exceeds spring travel");
    }
    return z;
}

bool check_phone_compatibility(double flash_cam_distance_mm) {
    if (flash_cam_distance_mm < 0.0) {
        throw Error(errc::negative_distance,
                    "distance " + std::to_string(flash_cam_distance_mm) + " mm");
    }
    return flash_cam_distance_mm <= kMaxFlashCamDistanceMm;
}

double light_transmission(const DeviceProfile& profile) {
    return std::exp(-profile.attenuation_coeff * profile.flash_cam_distance);
}

CalibrationFit calibrate_profile(const std::vector<std::pair<double, double>>& z_d_observations) {
    if (z_d_observations.size() < 2) {
        throw Error(errc::degenerate_calibration, "need at least 2 observations");
    }
    bool distinct = false;
    for (const auto& [z, d] : z_d_observations) {
        if (!(z > 0.0) || !(d > 0.0)) {
            throw Error(errc::degenerate_calibration, "observations must be strictly positive");
        }
        if (std::abs(z - z_d_observations.front().first) > 1e-12) distinct = true;
    }
    if (!distinct) {
        throw Error(errc::degenerate_calibration, "all observations at the same distance");
    }

    // minimize sum (d_i - C/z_i)^2  =>  C = sum(d_i/z_i) / sum(1/z_i^2)
    double num = 0.0;
    double den = 0.0;
    for (const auto& [z, d] : z_d_observations) {
        num += d / z;
        den += 1.0 / (z * z);
    }
    CalibrationFit fit;
    fit.projection_constant = num / den;

    double ss = 0.0;
    for (const auto& [z, d] : z_d_observations) {
        const double r = d - fit.projection_constant / z;
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / static_cast<double>(z_d_observations.size()));
    return fit;
}

namespace {
const char* kErrcNames[] = {
    "NonPositiveDiameter",
    "DistanceOutOfTravel",
    "DistanceExceedsRest",
    "NonPhysicalDistance",
    "NegativeDistance",
    "DegenerateCalibration",
    "InvalidProfile",
    "InvalidFrame",
    "NoProjection",
    "Saturated",
    "DiscClipped",
    "EmptyOutput",
    "TooShort",
    "SamplingTooSparse",
    "InsufficientLevels",
    "FitDiverged",
    "FlatOscillogram",
    "InvalidRatio",
    "ModelFeatureMismatch",
    "InsufficientData",
    "SingularDesign",
    "ImplausibleEstimate",
    "InvalidConfig",
    "SessionTerminated",
    "SessionAborted",
    "NotComplete",
    "NonMonotonicSamples",
    "InconsistentConfig",
    "DiscExceedsFrame",
    "IoError",
    "BadFormat",
    "UnknownPhoneModel",
    "Usage",
};
} // namespace

const char* errc_name(errc code) noexcept {
    const auto i = static_cast<std::size_t>(code);
    if (i >= sizeof(kErrcNames) / sizeof(kErrcNames[0])) return "UnknownError";
    return kErrcNames[i];
}

} // namespace bpclip
