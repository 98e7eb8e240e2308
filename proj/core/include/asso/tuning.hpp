#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "asso/ridge.hpp"
#include "asso/stft.hpp"

namespace asso {

// Smallest sigma for which two components `min_if_gap` Hz apart stay separated
// with separation degree w = 1.5 lambda(sigma), lambda the window half band
// sqrt(2|ln tau0|) / (2 pi sigma). Below it the half bands of neighbours overlap
// enough to bias the ridge values.
double separation_sigma_min(double min_if_gap, double tau0);

// Local Renyi entropy E(t, sigma) for every frame and every grid sigma.
// Undefined entries (no local energy) are NaN.
struct EntropyProfile {
    std::vector<double> sigma_grid;
    std::vector<double> time_grid;
    std::vector<double> entropy; // frame-major: entropy[frame * sigma_grid.size() + k]

    std::size_t frame_count() const noexcept { return time_grid.size(); }
    double at(std::size_t frame, std::size_t k) const { return entropy[frame * sigma_grid.size() + k]; }
};

// `count` log-spaced values from lo to hi inclusive (a single value when count == 1 or lo == hi).
std::vector<double> log_sigma_grid(double lo, double hi, std::size_t count);
// lo, lo + step, ... up to hi (hi included when it lands on the grid within 1e-9).
std::vector<double> linear_sigma_grid(double lo, double hi, double step);

/// Local Renyi entropy of `tf` around `frame`:
///   5 log2 sum |V|^2 - 2 log2 sum |V|^5
/// over frames with |t_b - t| <= zeta and bins with eta > 0, each sum scaled by
/// the frame and bin spacings. This is an order-2.5 Renyi entropy scaled by 3
/// (lower means more concentrated). Throws UndefinedEntropy when the local
/// energy is zero.
double renyi_entropy(const TFRepresentation& tf, std::size_t frame, double zeta);

// Entropy for every frame of x and every sigma in the grid, computed one sigma
// at a time with constant-sigma STFTs (the TF matrices are not retained).
EntropyProfile entropy_profile(const SampledSignal& x, const std::vector<double>& sigma_grid, double zeta,
                               const FrequencyGrid& grid, double truncation_radius = 5.0);

/// Per frame, the grid sigma with the smallest local entropy (ties to the
/// smaller sigma). Frames where entropy is undefined copy the nearest frame
/// with a selection. Throws UndefinedEntropy if no frame has one.
SigmaTrack select_global_sigma(const SampledSignal& x, const std::vector<double>& sigma_grid, double zeta,
                               const FrequencyGrid& grid, double truncation_radius = 5.0,
                               EntropyProfile* profile_out = nullptr);
SigmaTrack select_from_profile(const EntropyProfile& profile);

struct LocalSigmaOptions {
    double delta_sigma = 0.0;
    double er_epsilon = 0.05;
    double tau0 = 0.1;
    double sigma_min = 0.0;
    double truncation_radius = 5.0;
    LambdaConvention convention = LambdaConvention::dimensional;
};

struct LocalRefinement {
    SigmaTrack sigma;                    // sigma_p per ridge frame
    Ridge ridge;                         // ridge re-located at sigma_p
    std::vector<std::size_t> iterations; // accepted decrements per ridge frame
};

/// Shrinks the window frame by frame, starting at sigma_R, in steps of
/// delta_sigma. After each step the ridge is re-located inside the window's
/// half band around the last accepted frequency; the step is accepted while the
/// ridge moves by less than er_epsilon * lambda(sigma, r) and sigma stays at or
/// above sigma_min. Returns the last accepted sigma and ridge frequency.
/// `sigma_r` and `chirp` are aligned with the ridge support.
LocalRefinement refine_local_sigma(const SampledSignal& s, const Ridge& ridge, const SigmaTrack& sigma_r,
                                   const ChirpRateTrack& chirp, const FrequencyGrid& grid,
                                   const LocalSigmaOptions& options);

// CSV "time,sigma,entropy", one row per (frame, grid sigma).
void write_entropy_csv(std::ostream& os, const EntropyProfile& profile);

} // namespace asso
