#include "asso/stft.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <string>

#include "asso/errors.hpp"
#include "asso/io.hpp"
#include "asso/parallel.hpp"
#include "fft.hpp"

namespace asso {
namespace {

std::vector<double> make_taps(double sigma, double fs, double radius) {
    const std::size_t half = window_half_length(sigma, fs, radius);
    if (half < 1) {
        throw DegenerateWindow("window sigma " + format_double(sigma) +
                               " s covers fewer than 3 samples at this sample rate");
    }
    std::vector<double> taps(2 * half + 1);
    const double dt = 1.0 / fs;
    for (std::size_t i = 0; i < taps.size(); ++i) {
        const double t = (static_cast<double>(i) - static_cast<double>(half)) * dt;
        taps[i] = window_value(t, sigma) * dt;
    }
    return taps;
}

template <typename T>
void compute_frame(const BasicSignal<T>& x, std::size_t frame, std::span<const double> taps,
                   const FrequencyGrid& grid, StftMethod method, std::span<cplx> out) {
    const auto half = static_cast<std::ptrdiff_t>(taps.size() / 2);
    const auto n = static_cast<std::ptrdiff_t>(frame);
    const auto len = static_cast<std::ptrdiff_t>(x.size());
    const std::ptrdiff_t k_lo = std::max(-half, -n);
    const std::ptrdiff_t k_hi = std::min(half, len - 1 - n);

    if (method == StftMethod::automatic && grid.is_canonical_for(x.sample_rate)) {
        const auto m = static_cast<std::ptrdiff_t>(grid.fft_size);
        thread_local std::vector<cplx> in;
        thread_local std::vector<cplx> spec;
        in.assign(grid.fft_size, cplx{});
        spec.resize(grid.fft_size);
        for (std::ptrdiff_t k = k_lo; k <= k_hi; ++k) {
            // exp(-j 2 pi i k / M) is M-periodic in k, so folding taps modulo M is exact.
            const std::ptrdiff_t slot = ((k % m) + m) % m;
            in[static_cast<std::size_t>(slot)] += x.samples[static_cast<std::size_t>(n + k)] *
                                                  taps[static_cast<std::size_t>(k + half)];
        }
        detail::forward_dft(in, spec);
        std::copy_n(spec.begin(), grid.count, out.begin());
        return;
    }

    const double dt = 1.0 / x.sample_rate;
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double eta = grid.at(i);
        cplx acc{};
        for (std::ptrdiff_t k = k_lo; k <= k_hi; ++k) {
            const double tau = static_cast<double>(k) * dt;
            acc += x.samples[static_cast<std::size_t>(n + k)] * taps[static_cast<std::size_t>(k + half)] *
                   std::polar(1.0, -two_pi * eta * tau);
        }
        out[i] = acc;
    }
}

template <typename T>
std::vector<cplx> stft_frame_impl(const BasicSignal<T>& x, std::size_t frame, double sigma,
                                  const FrequencyGrid& grid, double radius, StftMethod method) {
    x.validate();
    grid.validate();
    if (!(sigma > 0.0)) {
        throw InvalidParameter("stft sigma must be positive");
    }
    if (frame >= x.size()) {
        throw InvalidParameter("frame index outside the record");
    }
    const auto taps = make_taps(sigma, x.sample_rate, radius);
    std::vector<cplx> out(grid.count);
    compute_frame(x, frame, taps, grid, method, out);
    return out;
}

template <typename T>
TFRepresentation adaptive_stft_impl(const BasicSignal<T>& x, const SigmaTrack& sigma_track,
                                    const FrequencyGrid& grid, std::size_t first_frame, double radius,
                                    StftMethod method) {
    x.validate();
    grid.validate();
    if (first_frame + sigma_track.size() > x.size()) {
        throw InvalidParameter("sigma track extends past the end of the record");
    }
    for (double s : sigma_track.values) {
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw InvalidParameter("sigma track values must be positive and finite");
        }
    }

    TFRepresentation tf;
    tf.first_frame = first_frame;
    tf.freq_grid = grid;
    tf.sigma_track = sigma_track;
    tf.time_grid.resize(sigma_track.size());
    tf.values.assign(sigma_track.size() * grid.count, cplx{});
    for (std::size_t j = 0; j < sigma_track.size(); ++j) {
        tf.time_grid[j] = x.time_at(first_frame + j);
    }

    const bool constant =
        std::adjacent_find(sigma_track.values.begin(), sigma_track.values.end(), std::not_equal_to<>()) ==
        sigma_track.values.end();
    std::vector<double> shared_taps;
    if (constant && !sigma_track.values.empty()) {
        try {
            shared_taps = make_taps(sigma_track.values.front(), x.sample_rate, radius);
        } catch (const DegenerateWindow& e) {
            throw DegenerateWindow(std::string(e.what()) + " (frame " + std::to_string(first_frame) + ")");
        }
    }

    parallel_for(0, sigma_track.size(), [&](std::size_t j) {
        const std::size_t frame = first_frame + j;
        std::span<cplx> out(tf.values.data() + j * grid.count, grid.count);
        if (constant) {
            compute_frame(x, frame, shared_taps, grid, method, out);
            return;
        }
        std::vector<double> taps;
        try {
            taps = make_taps(sigma_track.values[j], x.sample_rate, radius);
        } catch (const DegenerateWindow& e) {
            throw DegenerateWindow(std::string(e.what()) + " (frame " + std::to_string(frame) + ")");
        }
        compute_frame(x, frame, taps, grid, method, out);
    });
    return tf;
}

double standard_gaussian(double u) { return std::exp(-0.5 * u * u) / std::sqrt(two_pi); }

} // namespace

FrequencyGrid FrequencyGrid::fft(double sample_rate, std::size_t fft_size) {
    if (!(sample_rate > 0.0) || fft_size < 2) {
        throw InvalidParameter("FFT grid needs a positive sample rate and length >= 2");
    }
    FrequencyGrid g;
    g.start = 0.0;
    g.spacing = sample_rate / static_cast<double>(fft_size);
    g.count = fft_size / 2 + 1;
    g.fft_size = fft_size;
    g.sample_rate = sample_rate;
    return g;
}

FrequencyGrid FrequencyGrid::uniform(double start, double spacing, std::size_t count) {
    FrequencyGrid g;
    g.start = start;
    g.spacing = spacing;
    g.count = count;
    g.validate();
    return g;
}

std::size_t FrequencyGrid::nearest_bin(double freq) const {
    if (count == 0) {
        return 0;
    }
    const double pos = std::round((freq - start) / spacing);
    if (pos <= 0.0) {
        return 0;
    }
    return std::min(count - 1, static_cast<std::size_t>(pos));
}

bool FrequencyGrid::is_canonical_for(double fs) const noexcept {
    return fft_size != 0 && start == 0.0 && sample_rate == fs;
}

void FrequencyGrid::validate() const {
    if (count == 0) {
        throw InvalidParameter("frequency grid is empty");
    }
    if (!(spacing > 0.0) || !std::isfinite(spacing) || !std::isfinite(start)) {
        throw InvalidParameter("frequency grid spacing must be positive and finite");
    }
}

std::size_t default_fft_size(double sample_rate, double sigma_max, double truncation_radius) {
    const std::size_t support = 2 * window_half_length(sigma_max, sample_rate, truncation_radius) + 1;
    return std::bit_ceil(std::max<std::size_t>(4 * support, 16));
}

std::size_t window_half_length(double sigma, double sample_rate, double truncation_radius) {
    const double half = std::floor(truncation_radius * sigma * sample_rate + 1e-9);
    return half > 0.0 ? static_cast<std::size_t>(half) : 0;
}

std::vector<cplx> stft_frame(const SampledSignal& x, std::size_t frame, double sigma, const FrequencyGrid& grid,
                             double truncation_radius, StftMethod method) {
    return stft_frame_impl(x, frame, sigma, grid, truncation_radius, method);
}

std::vector<cplx> stft_frame(const ComplexSignal& x, std::size_t frame, double sigma, const FrequencyGrid& grid,
                             double truncation_radius, StftMethod method) {
    return stft_frame_impl(x, frame, sigma, grid, truncation_radius, method);
}

TFRepresentation adaptive_stft(const SampledSignal& x, const SigmaTrack& sigma_track, const FrequencyGrid& grid,
                               std::size_t first_frame, double truncation_radius, StftMethod method) {
    return adaptive_stft_impl(x, sigma_track, grid, first_frame, truncation_radius, method);
}

TFRepresentation adaptive_stft(const ComplexSignal& x, const SigmaTrack& sigma_track, const FrequencyGrid& grid,
                               std::size_t first_frame, double truncation_radius, StftMethod method) {
    return adaptive_stft_impl(x, sigma_track, grid, first_frame, truncation_radius, method);
}

double asso_window_sum(double a, double truncation_radius) {
    if (!(a > 0.0)) {
        throw InvalidParameter("ASSO scale a must be positive");
    }
    const auto reach = static_cast<std::ptrdiff_t>(std::floor(truncation_radius * a + 1e-9));
    double sum = 0.0;
    for (std::ptrdiff_t n = -reach; n <= reach; ++n) {
        sum += standard_gaussian(static_cast<double>(n) / a);
    }
    return sum;
}

cplx asso_discrete(const SampledSignal& x, std::size_t frame, double a, double delta, double eta,
                   double truncation_radius) {
    x.validate();
    if (frame >= x.size()) {
        throw InvalidParameter("frame index outside the record");
    }
    const double steps = delta * x.sample_rate;
    const double rounded = std::round(steps);
    if (!(rounded >= 1.0) || std::abs(steps - rounded) > 1e-9 * rounded) {
        throw InvalidParameter("delta must be a positive integer multiple of the sample period");
    }
    const double norm = asso_window_sum(a, truncation_radius);
    if (!(norm > 0.0)) {
        throw InvalidParameter("window sum h~_a must be positive");
    }
    const auto step = static_cast<std::ptrdiff_t>(rounded);
    const auto reach = static_cast<std::ptrdiff_t>(std::floor(truncation_radius * a + 1e-9));
    const auto t = static_cast<std::ptrdiff_t>(frame);
    const auto len = static_cast<std::ptrdiff_t>(x.size());
    cplx acc{};
    for (std::ptrdiff_t n = -reach; n <= reach; ++n) {
        const std::ptrdiff_t idx = t - n * step;
        if (idx < 0 || idx >= len) {
            continue;
        }
        const double h = standard_gaussian(static_cast<double>(n) / a);
        acc += x.samples[static_cast<std::size_t>(idx)] * h *
               std::polar(1.0, two_pi * delta * static_cast<double>(n) * eta);
    }
    return acc / norm;
}

double reconstruct_real(const TFRepresentation& tf, std::size_t frame) {
    if (!tf.contains_frame(frame)) {
        throw InvalidParameter("frame outside the time-frequency representation");
    }
    const auto& grid = tf.freq_grid;
    const auto row = tf.row(frame);
    cplx acc{};
    for (std::size_t i = 0; i < grid.count; ++i) {
        double w = 1.0;
        const bool first = (i == 0);
        const bool last = (i + 1 == grid.count);
        if (first && grid.start == 0.0) {
            w = 0.5;
        }
        // The closing Nyquist bin is shared with the negative half; an odd-length
        // FFT grid has no Nyquist bin.
        if (last && grid.count > 1 && (grid.fft_size == 0 || grid.fft_size % 2 == 0)) {
            w = 0.5;
        }
        acc += w * row[i];
    }
    const double g0 = window_value(0.0, tf.sigma_at(frame));
    return 2.0 * (acc * grid.spacing).real() / g0;
}

std::vector<double> extract_trend(const SampledSignal& x, double sigma, double truncation_radius) {
    x.validate();
    if (!(sigma > 0.0)) {
        throw InvalidParameter("trend sigma must be positive");
    }
    const auto taps = make_taps(sigma, x.sample_rate, truncation_radius);
    const auto half = static_cast<std::ptrdiff_t>(taps.size() / 2);
    const auto len = static_cast<std::ptrdiff_t>(x.size());
    std::vector<double> trend(x.size());
    parallel_for(0, x.size(), [&](std::size_t frame) {
        const auto n = static_cast<std::ptrdiff_t>(frame);
        double acc = 0.0;
        for (std::ptrdiff_t k = std::max(-half, -n); k <= std::min(half, len - 1 - n); ++k) {
            acc += x.samples[static_cast<std::size_t>(n + k)] * taps[static_cast<std::size_t>(k + half)];
        }
        trend[frame] = acc;
    });
    return trend;
}

void write_tf_csv(std::ostream& os, const TFRepresentation& tf) {
    os << "time,freq,re,im,abs\n";
    for (std::size_t j = 0; j < tf.frame_count(); ++j) {
        const std::size_t frame = tf.first_frame + j;
        const auto row = tf.row(frame);
        const std::string t = format_double(tf.time_grid[j]);
        for (std::size_t i = 0; i < tf.bin_count(); ++i) {
            os << t << ',' << format_double(tf.freq_grid.at(i)) << ',' << format_double(row[i].real()) << ','
               << format_double(row[i].imag()) << ',' << format_double(std::abs(row[i])) << '\n';
        }
    }
}

} // namespace asso
