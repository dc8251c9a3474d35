#include "bpclip/oscillometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace bpclip {

const char* to_string(EstimationMethod m) noexcept {
    return m == EstimationMethod::fixed_ratio ? "fixed_ratio" : "regression";
}

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + mid));
    }
    return m;
}

// Cholesky solve of a small symmetric positive definite system, in place.
// Returns false when a pivot collapses.
bool solve_spd(std::vector<double>& a, std::vector<double>& b, int n) {
    for (int j = 0; j < n; ++j) {
        double d = a[static_cast<std::size_t>(j) * n + j];
        for (int k = 0; k < j; ++k) {
            const double l = a[static_cast<std::size_t>(j) * n + k];
            d -= l * l;
        }
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        d = std::sqrt(d);
        a[static_cast<std::size_t>(j) * n + j] = d;
        for (int i = j + 1; i < n; ++i) {
            double s = a[static_cast<std::size_t>(i) * n + j];
            for (int k = 0; k < j; ++k) {
                s -= a[static_cast<std::size_t>(i) * n + k] * a[static_cast<std::size_t>(j) * n + k];
            }
            a[static_cast<std::size_t>(i) * n + j] = s / d;
        }
    }
    for (int i = 0; i < n; ++i) {
        double s = b[static_cast<std::size_t>(i)];
        for (int k = 0; k < i; ++k) s -= a[static_cast<std::size_t>(i) * n + k] * b[static_cast<std::size_t>(k)];
        b[static_cast<std::size_t>(i)] = s / a[static_cast<std::size_t>(i) * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < n; ++k) s -= a[static_cast<std::size_t>(k) * n + i] * b[static_cast<std::size_t>(k)];
        b[static_cast<std::size_t>(i)] = s / a[static_cast<std::size_t>(i) * n + i];
    }
    return true;
}

double sum_sq_residual(const Oscillogram& o, double a, double mu, double sig) {
    double ss = 0.0;
    for (const auto& p : o.points) {
        const double d = p.pressure - mu;
        const double r = a * std::exp(-d * d / (2.0 * sig * sig)) - p.amplitude;
        ss += r * r;
    }
    return ss;
}

double ratio_offset(double sigma, double ratio) {
    return sigma * std::sqrt(2.0 * std::log(1.0 / ratio));
}

double interpolate_amplitude(const Oscillogram& o, double pressure) {
    const auto& pts = o.points;
    if (pressure <= pts.front().pressure) return pts.front().amplitude;
    if (pressure >= pts.back().pressure) return pts.back().amplitude;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pressure <= pts[i].pressure) {
            const double frac =
                (pressure - pts[i - 1].pressure) / (pts[i].pressure - pts[i - 1].pressure);
            return pts[i - 1].amplitude + frac * (pts[i].amplitude - pts[i - 1].amplitude);
        }
    }
    return pts.back().amplitude;
}

double decode_confidence(const EnvelopeFit& fit) {
    if (!(fit.a_max > 0.0)) return 0.0;
    return std::clamp(1.0 - 2.0 * fit.rms_residual / fit.a_max, 0.0, 1.0);
}

bool within_validity_band(double systolic, double diastolic) {
    return systolic >= kValiditySystolicLow && systolic <= kValiditySystolicHigh &&
           diastolic >= kValidityDiastolicLow && diastolic <= kValidityDiastolicHigh;
}

} // namespace

Oscillogram build_oscillogram(const std::vector<PulseMetrics>& levels, const BuildParams& params) {
    std::vector<PulseMetrics> good;
    for (const PulseMetrics& m : levels) {
        if (m.quality == SignalQuality::good) good.push_back(m);
    }
    if (static_cast<int>(good.size()) < params.min_levels) {
        throw Error(errc::insufficient_levels,
                    std::to_string(good.size()) + " good levels, need >= " +
                        std::to_string(params.min_levels));
    }
    std::sort(good.begin(), good.end(),
              [](const PulseMetrics& a, const PulseMetrics& b) { return a.mean_pressure < b.mean_pressure; });

    Oscillogram out;
    std::size_t i = 0;
    while (i < good.size()) {
        std::size_t j = i + 1;
        while (j < good.size() &&
               good[j].mean_pressure - good[i].mean_pressure <= params.merge_within_mmhg) {
            ++j;
        }
        std::vector<double> pressures, amplitudes;
        int min_beats = std::numeric_limits<int>::max();
        for (std::size_t k = i; k < j; ++k) {
            pressures.push_back(good[k].mean_pressure);
            amplitudes.push_back(good[k].pulse_amplitude);
            min_beats = std::min(min_beats, good[k].n_beats);
        }
        OscillogramPoint p;
        p.pressure = std::accumulate(pressures.begin(), pressures.end(), 0.0) /
                     static_cast<double>(pressures.size());
        p.amplitude = median_of(amplitudes);
        p.n_beats = min_beats;
        p.quality = SignalQuality::good;
        out.points.push_back(p);
        i = j;
    }
    return out;
}

double envelope_value(const EnvelopeFit& fit, double pressure) {
    const double d = pressure - fit.map;
    return fit.a_max * std::exp(-d * d / (2.0 * fit.sigma * fit.sigma));
}

EnvelopeFit fit_envelope(const Oscillogram& oscillogram, const EnvelopeFitOptions& options) {
    const auto& pts = oscillogram.points;
    if (pts.size() < 3) {
        throw Error(errc::insufficient_levels, "need >= 3 oscillogram points to fit");
    }

    double max_amp = -std::numeric_limits<double>::infinity();
    double min_amp = std::numeric_limits<double>::infinity();
    double argmax_p = pts.front().pressure;
    for (const auto& p : pts) {
        if (p.amplitude > max_amp) {
            max_amp = p.amplitude;
            argmax_p = p.pressure;
        }
        min_amp = std::min(min_amp, p.amplitude);
    }
    if (max_amp < 3.0 * options.amplitude_noise_floor) {
        throw Error(errc::flat_oscillogram, "peak amplitude below 3x the noise floor");
    }
    if (max_amp - min_amp <= 1e-9 * std::abs(max_amp)) {
        throw Error(errc::flat_oscillogram, "amplitude does not vary with pressure");
    }

    double a = max_amp;
    double mu = argmax_p;
    const double span = pts.back().pressure - pts.front().pressure;
    double sig = 0.5 * span;

    // Trust bounds: candidate steps outside the physically meaningful region
    // are rejected (and the damping raised) rather than followed into the
    // flat far field where the least-squares surface gives no guidance.
    const double mu_lo = pts.front().pressure - 2.0 * span;
    const double mu_hi = pts.back().pressure + 2.0 * span;
    const double sig_lo = 0.02 * span;
    const double sig_hi = 10.0 * span;
    const double a_hi = 100.0 * max_amp;

    double best_a = a, best_mu = mu, best_sig = sig;
    double best_ss = sum_sq_residual(oscillogram, a, mu, sig);
    double lambda = 1e-3;
    int iter = 0;
    bool converged = false;

    for (; iter < options.max_iterations && !converged; ++iter) {
        // Normal equations with analytic Jacobian.
        std::vector<double> jtj(9, 0.0);
        std::vector<double> jtr(3, 0.0);
        for (const auto& p : pts) {
            const double d = p.pressure - mu;
            const double e = std::exp(-d * d / (2.0 * sig * sig));
            const double r = a * e - p.amplitude;
            const double j0 = e;
            const double j1 = a * e * d / (sig * sig);
            const double j2 = a * e * d * d / (sig * sig * sig);
            const double j[3] = {j0, j1, j2};
            for (int row = 0; row < 3; ++row) {
                for (int col = 0; col <= row; ++col) jtj[static_cast<std::size_t>(row) * 3 + col] += j[row] * j[col];
                jtr[static_cast<std::size_t>(row)] += j[row] * r;
            }
        }
        for (int row = 0; row < 3; ++row) {
            for (int col = row + 1; col < 3; ++col) {
                jtj[static_cast<std::size_t>(row) * 3 + col] = jtj[static_cast<std::size_t>(col) * 3 + row];
            }
        }

        bool stepped = false;
        for (int attempt = 0; attempt < 40 && !stepped; ++attempt) {
            std::vector<double> m = jtj;
            // Marquardt scaling keeps steps invariant under amplitude rescaling.
            for (int kdiag = 0; kdiag < 3; ++kdiag) {
                m[static_cast<std::size_t>(kdiag) * 3 + kdiag] *= 1.0 + lambda;
            }
            std::vector<double> delta = {-jtr[0], -jtr[1], -jtr[2]};
            if (!solve_spd(m, delta, 3)) {
                lambda *= 10.0;
                continue;
            }
            const double na = a + delta[0];
            const double nmu = mu + delta[1];
            const double nsig = std::abs(sig + delta[2]);
            if (!std::isfinite(na) || !std::isfinite(nmu) || !(nsig > 0.0) || na <= 0.0 ||
                na > a_hi || nmu < mu_lo || nmu > mu_hi || nsig < sig_lo || nsig > sig_hi) {
                lambda *= 10.0;
                continue;
            }
            const double ss = sum_sq_residual(oscillogram, na, nmu, nsig);
            if (ss <= best_ss) {
                const double eps = 1e-12;
                const double rel = std::max({std::abs(delta[0]) / (std::abs(a) + eps),
                                             std::abs(delta[1]) / (std::abs(mu) + eps),
                                             std::abs(delta[2]) / (std::abs(sig) + eps)});
                a = na;
                mu = nmu;
                sig = nsig;
                best_a = a;
                best_mu = mu;
                best_sig = sig;
                best_ss = ss;
                lambda = std::max(lambda * 0.1, 1e-12);
                stepped = true;
                converged = rel < options.relative_tolerance;
            } else {
                lambda = std::min(lambda * 10.0, 1e12);
            }
        }
        if (!stepped) break; // no downhill step found; best-so-far stands
    }

    if (!std::isfinite(best_a) || !std::isfinite(best_mu) || !(best_sig > 0.0) || !(best_a > 0.0)) {
        throw Error(errc::fit_diverged, "non-finite or non-positive envelope parameters");
    }
    if (best_mu < pts.front().pressure - best_sig || best_mu > pts.back().pressure + best_sig) {
        throw Error(errc::fit_diverged, "envelope peak landed outside the observed pressure range");
    }

    EnvelopeFit fit;
    fit.a_max = best_a;
    fit.map = best_mu;
    fit.sigma = best_sig;
    fit.rms_residual = std::sqrt(best_ss / static_cast<double>(pts.size()));
    fit.iterations = iter;
    return fit;
}

BpEstimate estimate_fixed_ratio(const EnvelopeFit& fit, const FixedRatios& ratios,
                                double heart_rate_bpm) {
    auto check = [](double r, const char* name) {
        if (!(r > 0.0) || r > 1.0 || !std::isfinite(r)) {
            throw Error(errc::invalid_ratio, std::string(name) + " must lie in (0, 1]");
        }
    };
    check(ratios.systolic, "systolic ratio");
    check(ratios.diastolic, "diastolic ratio");

    BpEstimate e;
    e.method = EstimationMethod::fixed_ratio;
    e.map = fit.map;
    e.systolic = fit.map + ratio_offset(fit.sigma, ratios.systolic);
    e.diastolic = fit.map - ratio_offset(fit.sigma, ratios.diastolic);
    e.heart_rate_bpm = heart_rate_bpm;
    e.confidence = decode_confidence(fit);
    if (ratios.systolic == 1.0 || ratios.diastolic == 1.0) {
        e.confidence = std::min(e.confidence, 0.2); // degenerate ratio collapses onto MAP
    }
    e.in_validity_range = within_validity_band(e.systolic, e.diastolic);
    return e;
}

const std::vector<std::string>& regression_feature_names() {
    static const std::vector<std::string> names = {
        "map_mmhg",        "sigma_mmhg",  "amp_peak",    "heart_rate_bpm",
        "amp_weighted_pressure_mmhg", "norm_amp_m20", "norm_amp_0", "norm_amp_p20",
    };
    return names;
}

std::vector<double> regression_features(const Oscillogram& oscillogram, const EnvelopeFit& fit,
                                        double heart_rate_bpm) {
    double amp_sum = 0.0;
    double weighted = 0.0;
    for (const auto& p : oscillogram.points) {
        amp_sum += p.amplitude;
        weighted += p.amplitude * p.pressure;
    }
    const double awmp = amp_sum > 0.0 ? weighted / amp_sum : fit.map;
    const double scale = fit.a_max > 0.0 ? fit.a_max : 1.0;
    return {
        fit.map,
        fit.sigma,
        fit.a_max,
        heart_rate_bpm,
        awmp,
        interpolate_amplitude(oscillogram, fit.map - 20.0) / scale,
        interpolate_amplitude(oscillogram, fit.map) / scale,
        interpolate_amplitude(oscillogram, fit.map + 20.0) / scale,
    };
}

BpEstimate estimate_regression(const Oscillogram& oscillogram, const EnvelopeFit& fit,
                               const RegressionModel& model, double heart_rate_bpm) {
    const auto& expected = regression_feature_names();
    if (model.features != expected || model.means.size() != expected.size() ||
        model.scales.size() != expected.size() ||
        model.systolic.coefficients.size() != expected.size() ||
        model.diastolic.coefficients.size() != expected.size()) {
        throw Error(errc::model_feature_mismatch, "model features do not match this build");
    }

    const std::vector<double> f = regression_features(oscillogram, fit, heart_rate_bpm);
    auto predict = [&](const RegressionHead& head) {
        double y = head.intercept;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double scale = model.scales[i] != 0.0 ? model.scales[i] : 1.0;
            y += head.coefficients[i] * (f[i] - model.means[i]) / scale;
        }
        return y;
    };

    BpEstimate e;
    e.method = EstimationMethod::regression;
    e.systolic = predict(model.systolic);
    e.diastolic = predict(model.diastolic);
    e.map = fit.map;
    e.heart_rate_bpm = heart_rate_bpm;
    e.confidence = decode_confidence(fit);
    e.in_validity_range = within_validity_band(e.systolic, e.diastolic);
    if (!(e.diastolic < e.map && e.map < e.systolic)) {
        throw Error(errc::implausible_estimate,
                    "predicted pressures do not bracket the envelope peak");
    }
    return e;
}

RegressionModel train_regression(const std::vector<LabeledFeatures>& sessions,
                                 const TrainOptions& options) {
    const auto& names = regression_feature_names();
    const int k = static_cast<int>(names.size());
    const int need = options.min_sessions_per_feature * k;
    if (static_cast<int>(sessions.size()) < need) {
        throw Error(errc::insufficient_data, std::to_string(sessions.size()) +
                                                 " sessions, need >= " + std::to_string(need));
    }
    for (const auto& s : sessions) {
        if (static_cast<int>(s.features.size()) != k) {
            throw Error(errc::model_feature_mismatch, "labeled session has wrong feature count");
        }
    }
    const std::size_t n = sessions.size();

    RegressionModel model;
    model.features = names;
    model.means.assign(static_cast<std::size_t>(k), 0.0);
    model.scales.assign(static_cast<std::size_t>(k), 1.0);
    for (int j = 0; j < k; ++j) {
        double mean = 0.0;
        for (const auto& s : sessions) mean += s.features[static_cast<std::size_t>(j)];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (const auto& s : sessions) {
            const double d = s.features[static_cast<std::size_t>(j)] - mean;
            var += d * d;
        }
        var /= static_cast<double>(n);
        model.means[static_cast<std::size_t>(j)] = mean;
        const double sd = std::sqrt(var);
        model.scales[static_cast<std::size_t>(j)] = sd > 1e-12 ? sd : 1.0;
    }

    auto standardized = [&](std::size_t row, int col) {
        return (sessions[row].features[static_cast<std::size_t>(col)] -
                model.means[static_cast<std::size_t>(col)]) /
               model.scales[static_cast<std::size_t>(col)];
    };

    auto fit_head = [&](auto label) -> RegressionHead {
        double y_mean = 0.0;
        for (const auto& s : sessions) y_mean += label(s);
        y_mean /= static_cast<double>(n);

        std::vector<double> ztz(static_cast<std::size_t>(k) * k, 0.0);
        std::vector<double> zty(static_cast<std::size_t>(k), 0.0);
        for (std::size_t row = 0; row < n; ++row) {
            const double yc = label(sessions[row]) - y_mean;
            for (int i = 0; i < k; ++i) {
                const double zi = standardized(row, i);
                zty[static_cast<std::size_t>(i)] += zi * yc;
                for (int j = 0; j <= i; ++j) {
                    ztz[static_cast<std::size_t>(i) * k + j] += zi * standardized(row, j);
                }
            }
        }
        for (int i = 0; i < k; ++i) {
            ztz[static_cast<std::size_t>(i) * k + i] += options.ridge_lambda;
            for (int j = i + 1; j < k; ++j) {
                ztz[static_cast<std::size_t>(i) * k + j] = ztz[static_cast<std::size_t>(j) * k + i];
            }
        }
        std::vector<double> w = zty;
        if (!solve_spd(ztz, w, k)) {
            throw Error(errc::singular_design, "normal equations not positive definite");
        }
        RegressionHead head;
        head.coefficients = std::move(w);
        head.intercept = y_mean;
        return head;
    };

    model.systolic = fit_head([](const LabeledFeatures& s) { return s.systolic; });
    model.diastolic = fit_head([](const LabeledFeatures& s) { return s.diastolic; });

    auto mae = [&](const RegressionHead& head, auto label) {
        double total = 0.0;
        for (std::size_t row = 0; row < n; ++row) {
            double y = head.intercept;
            for (int j = 0; j < k; ++j) y += head.coefficients[static_cast<std::size_t>(j)] * standardized(row, j);
            total += std::abs(y - label(sessions[row]));
        }
        return total / static_cast<double>(n);
    };
    model.metadata["trained_sessions"] = std::to_string(n);
    model.metadata["ridge_lambda"] = std::to_string(options.ridge_lambda);
    model.metadata["train_mae_systolic"] =
        std::to_string(mae(model.systolic, [](const LabeledFeatures& s) { return s.systolic; }));
    model.metadata["train_mae_diastolic"] =
        std::to_string(mae(model.diastolic, [](const LabeledFeatures& s) { return s.diastolic; }));
    return model;
}

} // namespace bpclip
