#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace asso {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Uniformly sampled time series. Sample n sits at start_time + n / sample_rate.
template <typename T>
struct BasicSignal {
    std::vector<T> samples;
    double sample_rate = 1.0;
    double start_time = 0.0;

    std::size_t size() const noexcept { return samples.size(); }
    double dt() const noexcept { return 1.0 / sample_rate; }
    double time_at(std::size_t n) const noexcept { return start_time + static_cast<double>(n) / sample_rate; }
    double duration() const noexcept { return static_cast<double>(samples.size()) / sample_rate; }

    // Throws InvalidParameter unless sample_rate > 0, size >= 2 and every sample is finite.
    void validate() const;
};

using SampledSignal = BasicSignal<double>;
using ComplexSignal = BasicSignal<cplx>;

extern template struct BasicSignal<double>;
extern template struct BasicSignal<cplx>;

// One AM-FM mode A(t) cos(2 pi phi(t)) with its analytic derivatives. Used by
// the synthetic generators and for scoring.
struct GroundTruthComponent {
    std::function<double(double)> amplitude;
    std::function<double(double)> phase;      // cycles
    std::function<double(double)> inst_freq;  // Hz
    std::function<double(double)> chirp_rate; // Hz/s

    double value(double t) const { return amplitude(t) * std::cos(two_pi * phase(t)); }
};

struct WindowSpec {
    double tau0 = 0.1;
    double truncation_radius = 5.0; // in units of sigma

    void validate() const;
};

// Which half band is used for ridge search windows D_t: the dimensionally
// consistent sqrt(2|ln tau0|)/(2 pi sigma) Hz, or the literal 2 pi sigma sqrt(2|ln tau0|).
enum class LambdaConvention { dimensional, verbatim };

enum class RecoveryModel { chirp, sinusoidal };

// Parameters of the separation pipeline. A value of 0 on sigma_min,
// sigma_max, delta_sigma, zeta, trend_sigma, freq_bins or fit_halfwidth_samples
// means "derive from the signal" (see resolve_config in pipeline.hpp).
struct AssoConfig {
    double tau0 = 0.1;
    double truncation_radius = 5.0;
    double gamma1_rel = 0.3;
    double gamma2_rel = 0.1;
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    double sigma_step = 0.0;        // > 0 selects a linear grid with this step
    std::size_t sigma_count = 24;   // log-spaced grid size when sigma_step == 0
    double delta_sigma = 0.0;
    double zeta = 0.0;
    double er_epsilon = 0.05;
    std::size_t smooth_len = 11;
    std::size_t max_components = 8;
    std::size_t freq_bins = 0;      // FFT length M; N1 = M/2 + 1 non-negative bins are kept
    std::size_t fit_halfwidth_samples = 0;
    bool extract_trend = true;
    double trend_sigma = 0.0;
    RecoveryModel recovery_model = RecoveryModel::chirp;
    bool refine_sigma = true;       // false: recover with sigma_R instead of sigma_p
    bool smooth_chirp_rate = true;
    LambdaConvention lambda_convention = LambdaConvention::dimensional;

    WindowSpec window() const { return {tau0, truncation_radius}; }

    // Checks the invariants that do not depend on the signal. Throws ConfigError.
    void validate() const;
};

/// Gaussian window g_sigma(t) = exp(-t^2 / (2 sigma^2)) / (sigma sqrt(2 pi)).
/// Unit integral over the real line.
double window_value(double t, double sigma);

/// m(xi) = exp(-2 pi^2 sigma^2 xi^2 / (1 - j 2 pi r sigma^2)), the frequency
/// profile of a linear chirp's STFT around its ridge.
cplx m_factor(double xi, double sigma, double r);

/// Half width lambda_m of the band outside which |m| falls below tau0:
/// sqrt(2|ln tau0|) * sqrt(1/(2 pi sigma)^2 + (r sigma)^2).
double essential_half_width(double sigma, double r, double tau0);

/// Frequency half band of the Gaussian window alone (r = 0) under the chosen convention.
double window_half_band(double sigma, double tau0, LambdaConvention convention = LambdaConvention::dimensional);

/// Time half width sigma * sqrt(2|ln tau0|) outside which g_sigma drops below tau0 of its peak.
double window_time_half_width(double sigma, double tau0);

/// Square root in the same quadrant as z. Requires Re(z) > 0.
cplx branch_sqrt(cplx z);

/// Closed-form adaptive STFT of A cos(2 pi (c t + r t^2 / 2)) at (t, eta),
/// dropping the negative-frequency term.
cplx chirp_stft_closed_form(double amplitude, double c, double r, double t, double eta, double sigma);

std::string to_string(LambdaConvention c);
std::string to_string(RecoveryModel m);

} // namespace asso
