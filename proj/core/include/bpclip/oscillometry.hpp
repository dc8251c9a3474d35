#pragma once

#include <map>
#include <string>
#include <vector>

#include "bpclip/ppg_signal.hpp"

namespace bpclip {

/// Estimates are marked out of range outside this working band, which
/// encloses the device's validated span with margin.
inline constexpr double kValiditySystolicLow = 70.0;
inline constexpr double kValiditySystolicHigh = 180.0;
inline constexpr double kValidityDiastolicLow = 40.0;
inline constexpr double kValidityDiastolicHigh = 110.0;

struct OscillogramPoint {
    double pressure = 0.0;  ///< mmHg
    double amplitude = 0.0; ///< brightness units
    int n_beats = 0;
    SignalQuality quality = SignalQuality::good;
};

/// Pulse amplitude as a function of applied pressure; pressures strictly
/// increasing.
struct Oscillogram {
    std::vector<OscillogramPoint> points;
};

struct BuildParams {
    double merge_within_mmhg = 5.0;
    int min_levels = 4;
};

/// Assembles the oscillogram from per-level metrics: good levels only,
/// sorted by pressure, near-duplicate pressures merged by amplitude median.
Oscillogram build_oscillogram(const std::vector<PulseMetrics>& levels,
                              const BuildParams& params = {});

/// Gaussian envelope A(P) = a_max * exp(-(P - map)^2 / (2 sigma^2)).
struct EnvelopeFit {
    double a_max = 0.0;
    double map = 0.0;   ///< mmHg, pressure at peak
    double sigma = 0.0; ///< mmHg
    double rms_residual = 0.0;
    int iterations = 0;
};

struct EnvelopeFitOptions {
    /// Amplitude noise floor; the envelope peak must clear 3x this value.
    double amplitude_noise_floor = 0.0;
    double relative_tolerance = 1e-8;
    int max_iterations = 200;
};

/// Nonlinear least squares of the Gaussian envelope (Levenberg-Marquardt
/// with Marquardt diagonal scaling). Initialized at the observed peak with
/// sigma at half the pressure span; returns the best parameters seen.
EnvelopeFit fit_envelope(const Oscillogram& oscillogram, const EnvelopeFitOptions& options = {});

double envelope_value(const EnvelopeFit& fit, double pressure);

enum class EstimationMethod { fixed_ratio, regression };

const char* to_string(EstimationMethod m) noexcept;

struct BpEstimate {
    double systolic = 0.0;
    double diastolic = 0.0;
    double map = 0.0;
    double heart_rate_bpm = 0.0;
    EstimationMethod method = EstimationMethod::fixed_ratio;
    double confidence = 0.0; ///< 0-1
    bool in_validity_range = false;
};

struct FixedRatios {
    double systolic = 0.55;
    double diastolic = 0.70;
};

/// Classic ratio decode on the fitted envelope: SBP/DBP are the pressures
/// where the envelope falls to the given fractions of its peak, on the
/// high- and low-pressure side respectively. Ratios must lie in (0, 1];
/// a ratio of exactly 1 collapses onto MAP and is flagged low confidence.
BpEstimate estimate_fixed_ratio(const EnvelopeFit& fit, const FixedRatios& ratios,
                                double heart_rate_bpm);

/// Feature order is part of the model contract.
const std::vector<std::string>& regression_feature_names();

/// Envelope-shape feature vector: map, sigma, a_max, heart rate,
/// amplitude-weighted mean pressure, and oscillogram amplitudes at
/// -20/0/+20 mmHg from MAP normalized by the fitted peak.
std::vector<double> regression_features(const Oscillogram& oscillogram, const EnvelopeFit& fit,
                                        double heart_rate_bpm);

struct RegressionHead {
    std::vector<double> coefficients;
    double intercept = 0.0;
};

/// Linear decode model, one head per pressure. Features are standardized
/// with the stored means/scales so coefficients stay portable across
/// training runs.
struct RegressionModel {
    std::vector<std::string> features;
    std::vector<double> means;
    std::vector<double> scales;
    RegressionHead systolic;
    RegressionHead diastolic;
    std::map<std::string, std::string> metadata;
};

BpEstimate estimate_regression(const Oscillogram& oscillogram, const EnvelopeFit& fit,
                               const RegressionModel& model, double heart_rate_bpm);

struct LabeledFeatures {
    std::vector<double> features;
    double systolic = 0.0;
    double diastolic = 0.0;
};

struct TrainOptions {
    double ridge_lambda = 1e-3;
    int min_sessions_per_feature = 10;
};

/// Ridge-regularized ordinary least squares per head. Deterministic given
/// input order; training MAE per head lands in the model metadata.
RegressionModel train_regression(const std::vector<LabeledFeatures>& sessions,
                                 const TrainOptions& options = {});

} // namespace bpclip
