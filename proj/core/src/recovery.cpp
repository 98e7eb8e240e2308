#include "asso/recovery.hpp"

#include <cmath>
#include <ostream>

#include "asso/errors.hpp"
#include "asso/io.hpp"

namespace asso {
namespace {

void check_alignment(const TFRepresentation& tf, const Ridge& ridge) {
    if (ridge.size() == 0) {
        return;
    }
    if (!tf.contains_frame(ridge.first_frame) || !tf.contains_frame(ridge.end_frame() - 1)) {
        throw InvalidParameter("ridge support extends beyond the time-frequency representation");
    }
    for (std::size_t b : ridge.bins) {
        if (b >= tf.bin_count()) {
            throw InvalidParameter("ridge bin outside the frequency grid");
        }
    }
}

void check_tracks(const Ridge& ridge, const ChirpRateTrack& chirp, const SigmaTrack& sigma) {
    if (chirp.size() != ridge.size() || chirp.first_frame != ridge.first_frame || sigma.size() != ridge.size()) {
        throw InvalidParameter("chirp and sigma tracks must share the ridge support");
    }
}

cplx chirp_factor(double sigma, double r) { return branch_sqrt(cplx(1.0, -two_pi * sigma * sigma * r)); }

} // namespace

std::vector<double> RecoveredComponent::on_record(std::size_t length) const {
    std::vector<double> out(length, 0.0);
    for (std::size_t j = 0; j < samples.size() && first_frame() + j < length; ++j) {
        out[first_frame() + j] = samples[j];
    }
    return out;
}

std::vector<double> recover_sinusoidal(const TFRepresentation& tf, const Ridge& ridge) {
    check_alignment(tf, ridge);
    std::vector<double> out(ridge.size());
    for (std::size_t j = 0; j < ridge.size(); ++j) {
        out[j] = 2.0 * tf.at(ridge.first_frame + j, ridge.bins[j]).real();
    }
    return out;
}

std::vector<double> recover_chirp(const TFRepresentation& tf, const Ridge& ridge, const ChirpRateTrack& chirp,
                                  const SigmaTrack& sigma) {
    check_alignment(tf, ridge);
    check_tracks(ridge, chirp, sigma);
    std::vector<double> out(ridge.size());
    for (std::size_t j = 0; j < ridge.size(); ++j) {
        const cplx v = tf.at(ridge.first_frame + j, ridge.bins[j]);
        out[j] = 2.0 * (chirp_factor(sigma[j], chirp.r[j]) * v).real();
    }
    return out;
}

std::vector<cplx> recover_complex(const TFRepresentation& tf, const Ridge& ridge, const ChirpRateTrack& chirp,
                                  const SigmaTrack& sigma) {
    check_alignment(tf, ridge);
    check_tracks(ridge, chirp, sigma);
    std::vector<cplx> out(ridge.size());
    for (std::size_t j = 0; j < ridge.size(); ++j) {
        out[j] = chirp_factor(sigma[j], chirp.r[j]) * tf.at(ridge.first_frame + j, ridge.bins[j]);
    }
    return out;
}

double error_bound_sinusoidal(double amplitude, double sigma, double r) {
    if (amplitude < 0.0 || !(sigma > 0.0)) {
        throw InvalidParameter("error bound needs amplitude >= 0 and sigma > 0");
    }
    const double b = two_pi * sigma * sigma * std::abs(r);
    const double q = std::sqrt(1.0 + b * b);
    return b * amplitude / (std::pow(1.0 + b * b, 0.25) * std::sqrt(1.0 + q));
}

void write_component_csv(std::ostream& os, const RecoveredComponent& c) {
    os << "time,value\n";
    for (std::size_t j = 0; j < c.samples.size(); ++j) {
        os << format_double(c.ridge.time_at(c.first_frame() + j)) << ',' << format_double(c.samples[j]) << '\n';
    }
}

} // namespace asso
