#pragma once

#include <stdexcept>
#include <string>

namespace bpclip {

/// Stable error identities used across the pipeline. The CLI maps these onto
/// its documented exit codes; library callers can switch on code() instead of
/// parsing messages.
enum class errc {
    // device_model
    non_positive_diameter,
    distance_out_of_travel,
    distance_exceeds_rest,
    non_physical_distance,
    negative_distance,
    degenerate_calibration,
    invalid_profile,
    // frame_analysis
    invalid_frame,
    no_projection,
    saturated,
    disc_clipped,
    empty_output,
    // ppg_signal
    too_short,
    sampling_too_sparse,
    // oscillometry
    insufficient_levels,
    fit_diverged,
    flat_oscillogram,
    invalid_ratio,
    model_feature_mismatch,
    insufficient_data,
    singular_design,
    implausible_estimate,
    // session_protocol
    invalid_config,
    session_terminated,
    session_aborted,
    not_complete,
    non_monotonic_samples,
    // digital_twin
    inconsistent_config,
    disc_exceeds_frame,
    // io / cli
    io_error,
    bad_format,
    unknown_phone_model,
    usage,
};

const char* errc_name(errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

} // namespace bpclip
