#include "asso/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "asso/errors.hpp"
#include "asso/io.hpp"
#include "asso/parallel.hpp"

namespace asso {
namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::size_t first_positive_bin(const FrequencyGrid& grid) { return grid.start > 0.0 ? 0 : 1; }

// Per-frame sums over eta > 0 of |V|^2 and |V|^5, scaled by the bin spacing.
void frame_moments(std::span<const cplx> row, const FrequencyGrid& grid, double& s2, double& s5) {
    s2 = 0.0;
    s5 = 0.0;
    for (std::size_t i = first_positive_bin(grid); i < grid.count; ++i) {
        const double m2 = std::norm(row[i]);
        s2 += m2;
        s5 += m2 * m2 * std::sqrt(m2);
    }
    s2 *= grid.spacing;
    s5 *= grid.spacing;
}

std::size_t zeta_frames(double zeta, double dt) {
    if (!(zeta >= 0.0)) {
        throw InvalidParameter("zeta must be non-negative");
    }
    return static_cast<std::size_t>(std::floor(zeta / dt + 1e-9));
}

double entropy_from_sums(double s2, double s5) {
    if (!(s2 > 0.0) || !(s5 > 0.0)) {
        return nan;
    }
    // Split off binary exponents so that scaling the signal by 2^j cancels exactly.
    int e2 = 0;
    int e5 = 0;
    const double m2 = std::frexp(s2, &e2);
    const double m5 = std::frexp(s5, &e5);
    return static_cast<double>(5 * e2 - 2 * e5) + (5.0 * std::log2(m2) - 2.0 * std::log2(m5));
}

} // namespace

double separation_sigma_min(double min_if_gap, double tau0) {
    if (!(min_if_gap > 0.0)) {
        throw InvalidParameter("min_if_gap must be positive");
    }
    return 1.5 * window_half_band(1.0, tau0) / min_if_gap;
}

std::vector<double> log_sigma_grid(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi >= lo) || count == 0) {
        throw InvalidParameter("sigma grid needs 0 < lo <= hi and count >= 1");
    }
    if (count == 1 || lo == hi) {
        return {lo};
    }
    std::vector<double> grid(count);
    const double ratio = std::log(hi / lo);
    for (std::size_t k = 0; k < count; ++k) {
        grid[k] = lo * std::exp(ratio * static_cast<double>(k) / static_cast<double>(count - 1));
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

std::vector<double> linear_sigma_grid(double lo, double hi, double step) {
    if (!(lo > 0.0) || !(hi >= lo) || !(step > 0.0)) {
        throw InvalidParameter("sigma grid needs 0 < lo <= hi and step > 0");
    }
    std::vector<double> grid;
    for (std::size_t k = 0;; ++k) {
        const double v = lo + step * static_cast<double>(k);
        if (v > hi * (1.0 + 1e-9)) {
            break;
        }
        grid.push_back(std::min(v, hi));
    }
    return grid;
}

double renyi_entropy(const TFRepresentation& tf, std::size_t frame, double zeta) {
    if (!tf.contains_frame(frame)) {
        throw InvalidParameter("entropy frame outside the time-frequency representation");
    }
    const double dt = tf.frame_count() > 1 ? tf.time_grid[1] - tf.time_grid[0] : 1.0;
    const std::size_t reach = zeta_frames(zeta, dt);
    const std::size_t lo = std::max(tf.first_frame, frame >= reach ? frame - reach : 0);
    const std::size_t hi = std::min(tf.end_frame() - 1, frame + reach);
    double s2 = 0.0;
    double s5 = 0.0;
    for (std::size_t b = lo; b <= hi; ++b) {
        double a2 = 0.0;
        double a5 = 0.0;
        frame_moments(tf.row(b), tf.freq_grid, a2, a5);
        s2 += a2 * dt;
        s5 += a5 * dt;
    }
    const double e = entropy_from_sums(s2, s5);
    if (std::isnan(e)) {
        throw UndefinedEntropy("zero local energy around frame " + std::to_string(frame));
    }
    return e;
}

EntropyProfile entropy_profile(const SampledSignal& x, const std::vector<double>& sigma_grid, double zeta,
                               const FrequencyGrid& grid, double truncation_radius) {
    x.validate();
    grid.validate();
    if (sigma_grid.empty()) {
        throw InvalidParameter("sigma grid is empty");
    }
    const std::size_t frames = x.size();
    const std::size_t nk = sigma_grid.size();
    const double dt = x.dt();
    const std::size_t reach = zeta_frames(zeta, dt);

    EntropyProfile profile;
    profile.sigma_grid = sigma_grid;
    profile.time_grid.resize(frames);
    for (std::size_t n = 0; n < frames; ++n) {
        profile.time_grid[n] = x.time_at(n);
    }
    profile.entropy.assign(frames * nk, nan);

    std::vector<double> s2(frames);
    std::vector<double> s5(frames);
    for (std::size_t k = 0; k < nk; ++k) {
        const SigmaTrack constant{std::vector<double>(frames, sigma_grid[k])};
        const TFRepresentation tf = adaptive_stft(x, constant, grid, 0, truncation_radius);
        parallel_for(0, frames, [&](std::size_t n) { frame_moments(tf.row(n), grid, s2[n], s5[n]); });
        parallel_for(0, frames, [&](std::size_t n) {
            const std::size_t lo = n >= reach ? n - reach : 0;
            const std::size_t hi = std::min(frames - 1, n + reach);
            double a2 = 0.0;
            double a5 = 0.0;
            for (std::size_t b = lo; b <= hi; ++b) {
                a2 += s2[b] * dt;
                a5 += s5[b] * dt;
            }
            profile.entropy[n * nk + k] = entropy_from_sums(a2, a5);
        });
    }
    return profile;
}

SigmaTrack select_from_profile(const EntropyProfile& profile) {
    const std::size_t frames = profile.frame_count();
    const std::size_t nk = profile.sigma_grid.size();
    std::vector<std::ptrdiff_t> choice(frames, -1);
    for (std::size_t n = 0; n < frames; ++n) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < nk; ++k) {
            const double e = profile.at(n, k);
            if (!std::isnan(e) && e < best) {
                best = e;
                choice[n] = static_cast<std::ptrdiff_t>(k);
            }
        }
    }
    if (std::none_of(choice.begin(), choice.end(), [](std::ptrdiff_t c) { return c >= 0; })) {
        throw UndefinedEntropy("local entropy is undefined on every frame (zero signal?)");
    }
    // Fill undefined frames from the nearest defined one, preferring the earlier on ties.
    std::vector<std::ptrdiff_t> filled = choice;
    for (std::size_t n = 0; n < frames; ++n) {
        if (choice[n] >= 0) {
            continue;
        }
        for (std::size_t d = 1; d < frames; ++d) {
            if (n >= d && choice[n - d] >= 0) {
                filled[n] = choice[n - d];
                break;
            }
            if (n + d < frames && choice[n + d] >= 0) {
                filled[n] = choice[n + d];
                break;
            }
        }
    }
    SigmaTrack track;
    track.values.resize(frames);
    for (std::size_t n = 0; n < frames; ++n) {
        track.values[n] = profile.sigma_grid[static_cast<std::size_t>(filled[n])];
    }
    return track;
}

SigmaTrack select_global_sigma(const SampledSignal& x, const std::vector<double>& sigma_grid, double zeta,
                               const FrequencyGrid& grid, double truncation_radius, EntropyProfile* profile_out) {
    if (!std::is_sorted(sigma_grid.begin(), sigma_grid.end())) {
        throw InvalidParameter("sigma grid must be ascending");
    }
    EntropyProfile profile = entropy_profile(x, sigma_grid, zeta, grid, truncation_radius);
    SigmaTrack track = select_from_profile(profile);
    if (profile_out != nullptr) {
        *profile_out = std::move(profile);
    }
    return track;
}

LocalRefinement refine_local_sigma(const SampledSignal& s, const Ridge& ridge, const SigmaTrack& sigma_r,
                                   const ChirpRateTrack& chirp, const FrequencyGrid& grid,
                                   const LocalSigmaOptions& options) {
    s.validate();
    if (sigma_r.size() != ridge.size() || chirp.size() != ridge.size()) {
        throw InvalidParameter("sigma_R and chirp tracks must match the ridge length");
    }
    if (!(options.delta_sigma > 0.0)) {
        throw InvalidParameter("delta_sigma must be positive");
    }
    if (ridge.end_frame() > s.size()) {
        throw InvalidParameter("ridge extends past the end of the signal");
    }

    LocalRefinement out;
    out.sigma.values = sigma_r.values;
    out.ridge = ridge;
    out.iterations.assign(ridge.size(), 0);

    parallel_for(0, ridge.size(), [&](std::size_t j) {
        const std::size_t frame = ridge.first_frame + j;
        double sigma = sigma_r[j];
        std::size_t bin = ridge.bins[j];
        double magnitude = ridge.magnitude[j];
        for (;;) {
            const double candidate = sigma - options.delta_sigma;
            if (candidate < options.sigma_min * (1.0 - 1e-12) || !(candidate > 0.0)) {
                break;
            }
            std::vector<cplx> row;
            try {
                row = stft_frame(s, frame, candidate, grid, options.truncation_radius);
            } catch (const DegenerateWindow&) {
                break;
            }
            const double centre = grid.at(bin);
            const double band = window_half_band(candidate, options.tau0, options.convention);
            const std::size_t moved = banded_argmax(row, grid, centre, band);
            const double tolerance = options.er_epsilon * essential_half_width(candidate, chirp.r[j], options.tau0);
            if (!(std::abs(grid.at(moved) - centre) < tolerance)) {
                break;
            }
            sigma = candidate;
            bin = moved;
            magnitude = std::abs(row[moved]);
            ++out.iterations[j];
        }
        out.sigma.values[j] = sigma;
        out.ridge.bins[j] = bin;
        out.ridge.eta[j] = grid.at(bin);
        out.ridge.magnitude[j] = magnitude;
    });
    return out;
}

void write_entropy_csv(std::ostream& os, const EntropyProfile& profile) {
    os << "time,sigma,entropy\n";
    for (std::size_t n = 0; n < profile.frame_count(); ++n) {
        const std::string t = format_double(profile.time_grid[n]);
        for (std::size_t k = 0; k < profile.sigma_grid.size(); ++k) {
            os << t << ',' << format_double(profile.sigma_grid[k]) << ',' << format_double(profile.at(n, k)) << '\n';
        }
    }
}

} // namespace asso
