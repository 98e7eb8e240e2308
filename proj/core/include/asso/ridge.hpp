#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "asso/stft.hpp"

namespace asso {

// Frequency curve of one component over a contiguous run of frames
// [first_frame, first_frame + size()).
struct Ridge {
    std::size_t first_frame = 0;
    double dt = 1.0;         // frame spacing, seconds
    double start_time = 0.0; // time of frame 0
    std::vector<std::size_t> bins;
    std::vector<double> eta;
    std::vector<double> magnitude;

    std::size_t size() const noexcept { return eta.size(); }
    std::size_t end_frame() const noexcept { return first_frame + size(); }
    bool contains(std::size_t frame) const noexcept { return frame >= first_frame && frame < end_frame(); }
    double time_at(std::size_t frame) const noexcept { return start_time + static_cast<double>(frame) * dt; }
    double eta_at(std::size_t frame) const { return eta[frame - first_frame]; }
};

// Chirp rate estimates (Hz/s) aligned with a Ridge's support.
struct ChirpRateTrack {
    std::size_t first_frame = 0;
    std::vector<double> r;

    std::size_t size() const noexcept { return r.size(); }
};

struct Peak {
    std::size_t frame = 0;
    std::size_t bin = 0;
    double freq = 0.0;
    double magnitude = 0.0;
};

// Argmax of |row| over bins within half_band of `centre`, restricted to eta > 0.
// Ties go to the bin nearest `centre`; a band narrower than one bin yields the
// bin nearest `centre`.
std::size_t banded_argmax(std::span<const cplx> row, const FrequencyGrid& grid, double centre, double half_band);

/// Largest |V| over all frames and bins with eta > 0. Ties go to the lowest
/// frame, then the lowest bin. Throws NoPeak when every such entry is zero.
Peak global_peak(const TFRepresentation& tf);

/// Greedy ridge tracking from `seed`: march right then left, taking at each
/// frame the argmax of |V| inside [eta_prev - half_band, eta_prev + half_band]
/// (clipped to eta > 0), and stop in each direction once the on-ridge
/// magnitude drops to <= gamma2_abs. Ties prefer the bin closest to eta_prev.
/// `half_band` holds one value per tf frame. Throws EmptyRidge when the seed
/// itself is at or below gamma2_abs.
Ridge detect_ridge(const TFRepresentation& tf, const Peak& seed, std::span<const double> half_band, double gamma2_abs);
Ridge detect_ridge(const TFRepresentation& tf, const Peak& seed, double half_band, double gamma2_abs);

/// Least-squares slope r of eta(t+u) ~ eta(t) + r u over ridge frames within
/// +-fit_halfwidth of `frame` (window truncated at the support edges).
/// Throws InsufficientData with fewer than 3 points in the window.
double estimate_chirp_rate(const Ridge& ridge, std::size_t frame, std::size_t fit_halfwidth);

// estimate_chirp_rate on every ridge frame; frames with too little data get r = 0.
// `fit_halfwidth` holds one value per ridge frame.
ChirpRateTrack estimate_chirp_track(const Ridge& ridge, std::span<const std::size_t> fit_halfwidth);
ChirpRateTrack estimate_chirp_track(const Ridge& ridge, std::size_t fit_halfwidth);

// Fit half-width in frames covering the window's time-domain essential support, floor 5.
std::size_t default_fit_halfwidth(double sigma, double tau0, double sample_rate);

// CSV with header "time,eta,magnitude,r". `chirp` may be null (r written as 0).
void write_ridge_csv(std::ostream& os, const Ridge& ridge, const ChirpRateTrack* chirp);

} // namespace asso
