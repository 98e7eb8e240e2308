#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "asso/core.hpp"

namespace asso {

// Uniform grid of analysis frequencies eta_i = start + i * spacing, i < count.
// A grid built by FrequencyGrid::fft is "canonical" for its sample rate: its
// bins coincide with the DFT bins of length fft_size, so frames are computed
// with an FFT instead of direct summation.
struct FrequencyGrid {
    double start = 0.0;
    double spacing = 1.0;
    std::size_t count = 0;
    std::size_t fft_size = 0;   // 0 for a non-canonical grid
    double sample_rate = 0.0;   // sample rate the canonical grid was built for

    static FrequencyGrid fft(double sample_rate, std::size_t fft_size);
    static FrequencyGrid uniform(double start, double spacing, std::size_t count);

    double at(std::size_t i) const noexcept { return start + spacing * static_cast<double>(i); }
    double last() const noexcept { return at(count == 0 ? 0 : count - 1); }
    std::size_t nearest_bin(double freq) const;
    bool is_canonical_for(double fs) const noexcept;

    void validate() const;
};

struct SigmaTrack {
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t n) const { return values[n]; }
};

// V(t_n, eta_i) for a contiguous run of frames. Frame indices are global
// sample indices of the analysed signal; `first_frame` is the index of row 0.
struct TFRepresentation {
    std::size_t first_frame = 0;
    std::vector<double> time_grid;
    FrequencyGrid freq_grid;
    SigmaTrack sigma_track;
    std::vector<cplx> values; // row-major: frame-major, bin-minor

    std::size_t frame_count() const noexcept { return time_grid.size(); }
    std::size_t bin_count() const noexcept { return freq_grid.count; }
    std::size_t end_frame() const noexcept { return first_frame + frame_count(); }
    bool contains_frame(std::size_t frame) const noexcept {
        return frame >= first_frame && frame < end_frame();
    }

    cplx at(std::size_t frame, std::size_t bin) const { return values[(frame - first_frame) * bin_count() + bin]; }
    std::span<const cplx> row(std::size_t frame) const {
        return {values.data() + (frame - first_frame) * bin_count(), bin_count()};
    }
    double sigma_at(std::size_t frame) const { return sigma_track.values[frame - first_frame]; }
};

enum class StftMethod { automatic, direct };

// Default analysis grid: FFT length = next power of two >= 4x the truncated
// support (2L+1 samples) of the widest window, non-negative half kept.
std::size_t default_fft_size(double sample_rate, double sigma_max, double truncation_radius);

// Half length L of the truncated window in samples: floor(radius * sigma * fs).
std::size_t window_half_length(double sigma, double sample_rate, double truncation_radius);

/// One column of the adaptive STFT,
///   V(t_n, eta) = sum_k x[n+k] g_sigma(k/fs) exp(-j 2 pi eta k/fs) / fs,
/// over |k| <= L with samples outside the record taken as zero.
/// Throws DegenerateWindow when fewer than 3 samples fall under the window.
std::vector<cplx> stft_frame(const SampledSignal& x, std::size_t frame, double sigma, const FrequencyGrid& grid,
                             double truncation_radius = 5.0, StftMethod method = StftMethod::automatic);
std::vector<cplx> stft_frame(const ComplexSignal& x, std::size_t frame, double sigma, const FrequencyGrid& grid,
                             double truncation_radius = 5.0, StftMethod method = StftMethod::automatic);

/// Adaptive STFT over frames [first_frame, first_frame + sigma_track.size()),
/// column n using sigma_track[n - first_frame]. Frames run in parallel.
TFRepresentation adaptive_stft(const SampledSignal& x, const SigmaTrack& sigma_track, const FrequencyGrid& grid,
                               std::size_t first_frame = 0, double truncation_radius = 5.0,
                               StftMethod method = StftMethod::automatic);
TFRepresentation adaptive_stft(const ComplexSignal& x, const SigmaTrack& sigma_track, const FrequencyGrid& grid,
                               std::size_t first_frame = 0, double truncation_radius = 5.0,
                               StftMethod method = StftMethod::automatic);

// h~_a = sum_n h(n / a) for the unit-integral Gaussian h truncated at |u| <= radius.
double asso_window_sum(double a, double truncation_radius = 5.0);

// Discrete signal separation operator
//   (1 / h~_a) sum_n x(t - n delta) h(n / a) exp(j 2 pi delta n eta)
// at t = frame. delta must be a positive integer multiple of the sample period.
// Approximates stft_frame with sigma = delta * a.
cplx asso_discrete(const SampledSignal& x, std::size_t frame, double a, double delta, double eta,
                   double truncation_radius = 5.0);

/// Inverts one frame of a real signal's STFT from its non-negative frequency half:
/// x(t) = 2 Re{ sum_i w_i V(t, eta_i) d_eta } / g_sigma(0), trapezoid weights w_i.
/// Exact on the canonical FFT grid; degrades gracefully when the grid misses part of the band.
double reconstruct_real(const TFRepresentation& tf, std::size_t frame);

/// Trend estimate Re{V(t, 0)} with a constant window width, one value per sample.
std::vector<double> extract_trend(const SampledSignal& x, double sigma, double truncation_radius = 5.0);

// CSV with header "time,freq,re,im,abs", one row per (frame, bin).
void write_tf_csv(std::ostream& os, const TFRepresentation& tf);

} // namespace asso
