#include "asso/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "asso/errors.hpp"
#include "asso/io.hpp"
#include "asso/parallel.hpp"

namespace asso {
std::size_t banded_argmax(std::span<const cplx> row, const FrequencyGrid& grid, double centre, double half_band) {
    const double lo_f = centre - half_band;
    const double hi_f = centre + half_band;
    std::size_t lo = lo_f <= grid.start ? 0 : static_cast<std::size_t>(std::ceil((lo_f - grid.start) / grid.spacing));
    std::size_t hi = hi_f <= grid.start ? 0 : static_cast<std::size_t>(std::floor((hi_f - grid.start) / grid.spacing));
    hi = std::min(hi, grid.count - 1);
    const std::size_t first_positive = grid.start > 0.0 ? 0 : 1;
    lo = std::max(lo, first_positive);
    const std::size_t centre_bin = grid.nearest_bin(centre);
    if (lo > hi) {
        // Band narrower than a bin: fall back to the bin nearest the centre.
        return std::max(centre_bin, first_positive);
    }
    std::size_t best = lo;
    double best_mag = -1.0;
    for (std::size_t i = lo; i <= hi; ++i) {
        const double mag = std::abs(row[i]);
        if (mag > best_mag) {
            best = i;
            best_mag = mag;
        } else if (mag == best_mag) {
            const auto dist = [&](std::size_t b) { return std::abs(grid.at(b) - centre); };
            if (dist(i) < dist(best)) {
                best = i;
            }
        }
    }
    return best;
}

Peak global_peak(const TFRepresentation& tf) {
    if (tf.frame_count() == 0 || tf.bin_count() == 0) {
        throw NoPeak("empty time-frequency representation");
    }
    const std::size_t first_positive = tf.freq_grid.start > 0.0 ? 0 : 1;
    Peak best;
    best.magnitude = 0.0;
    bool found = false;
    for (std::size_t j = 0; j < tf.frame_count(); ++j) {
        const std::size_t frame = tf.first_frame + j;
        const auto row = tf.row(frame);
        for (std::size_t i = first_positive; i < tf.bin_count(); ++i) {
            const double mag = std::abs(row[i]);
            if (mag > best.magnitude) {
                best = {frame, i, tf.freq_grid.at(i), mag};
                found = true;
            }
        }
    }
    if (!found) {
        throw NoPeak("time-frequency representation has no positive-frequency energy");
    }
    return best;
}

Ridge detect_ridge(const TFRepresentation& tf, const Peak& seed, std::span<const double> half_band,
                   double gamma2_abs) {
    if (!tf.contains_frame(seed.frame) || seed.bin >= tf.bin_count()) {
        throw InvalidParameter("ridge seed lies outside the time-frequency representation");
    }
    if (half_band.size() != tf.frame_count()) {
        throw InvalidParameter("half_band needs one value per frame");
    }
    const double seed_mag = std::abs(tf.at(seed.frame, seed.bin));
    if (!(seed_mag > gamma2_abs)) {
        throw EmptyRidge("ridge seed magnitude is not above gamma2");
    }
    const auto band_at = [&](std::size_t frame) { return half_band[frame - tf.first_frame]; };

    std::vector<std::size_t> right;
    std::size_t prev = seed.bin;
    for (std::size_t frame = seed.frame + 1; frame < tf.end_frame(); ++frame) {
        const std::size_t b = banded_argmax(tf.row(frame), tf.freq_grid, tf.freq_grid.at(prev), band_at(frame - 1));
        if (!(std::abs(tf.at(frame, b)) > gamma2_abs)) {
            break;
        }
        right.push_back(b);
        prev = b;
    }
    std::vector<std::size_t> left;
    prev = seed.bin;
    for (std::size_t frame = seed.frame; frame > tf.first_frame; --frame) {
        const std::size_t b = banded_argmax(tf.row(frame - 1), tf.freq_grid, tf.freq_grid.at(prev), band_at(frame));
        if (!(std::abs(tf.at(frame - 1, b)) > gamma2_abs)) {
            break;
        }
        left.push_back(b);
        prev = b;
    }

    Ridge ridge;
    ridge.first_frame = seed.frame - left.size();
    ridge.dt = tf.frame_count() > 1 ? (tf.time_grid[1] - tf.time_grid[0]) : 1.0;
    ridge.start_time = tf.time_grid.front() - static_cast<double>(tf.first_frame) * ridge.dt;
    ridge.bins.assign(left.rbegin(), left.rend());
    ridge.bins.push_back(seed.bin);
    ridge.bins.insert(ridge.bins.end(), right.begin(), right.end());
    ridge.eta.resize(ridge.bins.size());
    ridge.magnitude.resize(ridge.bins.size());
    for (std::size_t j = 0; j < ridge.bins.size(); ++j) {
        ridge.eta[j] = tf.freq_grid.at(ridge.bins[j]);
        ridge.magnitude[j] = std::abs(tf.at(ridge.first_frame + j, ridge.bins[j]));
    }
    return ridge;
}

Ridge detect_ridge(const TFRepresentation& tf, const Peak& seed, double half_band, double gamma2_abs) {
    const std::vector<double> bands(tf.frame_count(), half_band);
    return detect_ridge(tf, seed, bands, gamma2_abs);
}

double estimate_chirp_rate(const Ridge& ridge, std::size_t frame, std::size_t fit_halfwidth) {
    if (!ridge.contains(frame)) {
        throw InvalidParameter("chirp-rate frame outside the ridge support");
    }
    const std::size_t lo = std::max(ridge.first_frame, frame >= fit_halfwidth ? frame - fit_halfwidth : 0);
    const std::size_t hi = std::min(ridge.end_frame() - 1, frame + fit_halfwidth);
    if (hi - lo + 1 < 3) {
        throw InsufficientData("fewer than 3 ridge points in the chirp-rate fit window");
    }
    const double centre = ridge.eta_at(frame);
    double suu = 0.0;
    double sue = 0.0;
    for (std::size_t f = lo; f <= hi; ++f) {
        const double u = (static_cast<double>(f) - static_cast<double>(frame)) * ridge.dt;
        suu += u * u;
        sue += u * (ridge.eta_at(f) - centre);
    }
    return sue / suu;
}

ChirpRateTrack estimate_chirp_track(const Ridge& ridge, std::span<const std::size_t> fit_halfwidth) {
    if (fit_halfwidth.size() != ridge.size()) {
        throw InvalidParameter("fit_halfwidth needs one value per ridge frame");
    }
    ChirpRateTrack track;
    track.first_frame = ridge.first_frame;
    track.r.assign(ridge.size(), 0.0);
    parallel_for(0, ridge.size(), [&](std::size_t j) {
        try {
            track.r[j] = estimate_chirp_rate(ridge, ridge.first_frame + j, fit_halfwidth[j]);
        } catch (const InsufficientData&) {
            track.r[j] = 0.0;
        }
    });
    return track;
}

ChirpRateTrack estimate_chirp_track(const Ridge& ridge, std::size_t fit_halfwidth) {
    const std::vector<std::size_t> widths(ridge.size(), fit_halfwidth);
    return estimate_chirp_track(ridge, widths);
}

std::size_t default_fit_halfwidth(double sigma, double tau0, double sample_rate) {
    const double samples = std::ceil(window_time_half_width(sigma, tau0) * sample_rate);
    return std::max<std::size_t>(5, static_cast<std::size_t>(samples));
}

void write_ridge_csv(std::ostream& os, const Ridge& ridge, const ChirpRateTrack* chirp) {
    os << "time,eta,magnitude,r\n";
    for (std::size_t j = 0; j < ridge.size(); ++j) {
        const double r = (chirp != nullptr && j < chirp->size()) ? chirp->r[j] : 0.0;
        os << format_double(ridge.time_at(ridge.first_frame + j)) << ',' << format_double(ridge.eta[j]) << ','
           << format_double(ridge.magnitude[j]) << ',' << format_double(r) << '\n';
    }
}

} // namespace asso
