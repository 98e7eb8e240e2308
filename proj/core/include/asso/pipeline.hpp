#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "asso/core.hpp"
#include "asso/recovery.hpp"
#include "asso/tuning.hpp"

namespace asso {

enum class StopReason {
    below_threshold,   // global peak <= gamma1
    max_components,
    no_peak,
    empty_ridge,
    undefined_entropy, // residual carries no energy
    degenerate_window,
};

std::string to_string(StopReason r);

struct ComponentDiagnostics {
    Peak peak;
    Ridge initial_ridge;           // tracked on the sigma_R representation
    SigmaTrack sigma_global;       // smoothed sigma_R over the support
    SigmaTrack sigma_local;        // sigma_p over the support
    std::vector<std::size_t> refine_iterations;
    double energy_before = 0.0;    // ||s||^2 over the support before subtraction
    double energy_after = 0.0;
    // Recovery under the model not selected in the config, from the same
    // representation, ridge and sigma track. Not subtracted.
    std::vector<double> alternate_samples;
};

struct SeparationResult {
    double sample_rate = 1.0;
    double start_time = 0.0;
    std::vector<double> trend;
    std::vector<RecoveredComponent> components; // extraction order
    std::vector<double> residual;
    AssoConfig config_used;
    std::vector<ComponentDiagnostics> diagnostics;
    StopReason stop_reason = StopReason::below_threshold;
    std::string stop_detail;

    // trend + sum of zero-extended components + residual.
    std::vector<double> reassemble() const;
};

/// Centered moving average of odd length; near the edges the window shrinks
/// to the samples that exist.
std::vector<double> smooth_track(std::span<const double> track, std::size_t smooth_len);

// Fills every "derive from the signal" field of cfg: sigma_min = 6 samples,
// sigma_max = duration / 8, zeta = 8 sigma_max, trend_sigma = sigma_min,
// delta_sigma = mean grid step, freq_bins from the widest window.
AssoConfig resolve_config(const AssoConfig& cfg, double sample_rate, std::size_t length);

// Grid of candidate sigmas for a resolved config.
std::vector<double> sigma_grid(const AssoConfig& resolved);

/// Trend removal followed by one-by-one extraction: global sigma by entropy,
/// global peak, ridge tracking, local sigma refinement, chirp-rate fitting,
/// recovery and subtraction, until the peak falls to gamma1 or
/// max_components is reached. trend + components + residual reproduces x.
/// Runtime degeneracies end the loop early with a recorded StopReason.
SeparationResult separate(const SampledSignal& x, const AssoConfig& config);

// JSON manifest describing a result: config, stop reason and per-component diagnostics.
std::string separation_manifest_json(const SeparationResult& result);

// Writes trend.csv, residual.csv, component_<k>.csv, ridges.csv, sigma_<k>.csv
// into dir and returns the file names written.
std::vector<std::string> write_separation_bundle(const std::filesystem::path& dir, const SeparationResult& result);

} // namespace asso
