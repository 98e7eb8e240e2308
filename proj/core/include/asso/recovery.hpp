#pragma once

#include <iosfwd>
#include <vector>

#include "asso/ridge.hpp"
#include "asso/stft.hpp"

namespace asso {

struct RecoveredComponent {
    std::vector<double> samples; // one per ridge frame
    Ridge ridge;
    ChirpRateTrack chirp_track;
    SigmaTrack sigma_track_used; // restricted to the ridge support

    std::size_t first_frame() const noexcept { return ridge.first_frame; }
    std::size_t end_frame() const noexcept { return ridge.end_frame(); }
    // Samples zero-extended to a record of `length` samples.
    std::vector<double> on_record(std::size_t length) const;
};

/// Sinusoidal-model recovery 2 Re{V(t, eta(t))} along the ridge.
std::vector<double> recover_sinusoidal(const TFRepresentation& tf, const Ridge& ridge);

/// Chirp-model recovery 2 Re{ sqrt(1 - j 2 pi sigma(t)^2 r(t)) V(t, eta(t)) }.
std::vector<double> recover_chirp(const TFRepresentation& tf, const Ridge& ridge, const ChirpRateTrack& chirp,
                                  const SigmaTrack& sigma);

/// Complex-signal variant: sqrt(1 - j 2 pi sigma^2 r) V(t, eta(t)) without the real projection.
std::vector<cplx> recover_complex(const TFRepresentation& tf, const Ridge& ridge, const ChirpRateTrack& chirp,
                                  const SigmaTrack& sigma);

/// Upper bound on the sinusoidal-model error for a linear chirp of rate r:
/// 2 pi sigma^2 |r| A / ((1 + 4 pi^2 sigma^4 r^2)^(1/4) (1 + sqrt(1 + 4 pi^2 sigma^4 r^2))^(1/2)).
double error_bound_sinusoidal(double amplitude, double sigma, double r);

// CSV "time,value" for a recovered component over its support.
void write_component_csv(std::ostream& os, const RecoveredComponent& c);

} // namespace asso
