#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "asso/errors.hpp"
#include "asso/recovery.hpp"
#include "helpers.hpp"

using namespace asso;
using asso::test::sample;

namespace {

struct LfmSetup {
    SampledSignal x;
    TFRepresentation tf;
    Ridge ridge;
    SigmaTrack sigma;
};

LfmSetup lfm(double sigma) {
    LfmSetup s;
    s.x = sample([](double t) { return std::cos(2 * M_PI * (17 * t + 18.5 * t * t)); }, 512, 512);
    s.sigma.values.assign(512, sigma);
    s.tf = adaptive_stft(s.x, s.sigma, FrequencyGrid::fft(512, 4096));
    const Peak p = global_peak(s.tf);
    s.ridge = detect_ridge(s.tf, p, window_half_band(sigma, 0.1), 0.1 * p.magnitude);
    return s;
}

double max_err(const std::vector<double>& rec, const LfmSetup& s, double t0, double t1) {
    double e = 0.0;
    for (std::size_t j = 0; j < rec.size(); ++j) {
        const std::size_t n = s.ridge.first_frame + j;
        const double t = s.x.time_at(n);
        if (t >= t0 && t <= t1) {
            e = std::max(e, std::abs(rec[j] - s.x.samples[n]));
        }
    }
    return e;
}

} // namespace

TEST(Recovery, ChirpModelExactForLinearChirpWithTrueRate) {
    const auto s = lfm(0.02);
    ChirpRateTrack chirp{s.ridge.first_frame, std::vector<double>(s.ridge.size(), 37.0)};
    const auto rec = recover_chirp(s.tf, s.ridge, chirp, s.sigma);
    EXPECT_LT(max_err(rec, s, 0.2, 0.8), 1e-3);
}

TEST(Recovery, SinusoidalErrorNearAnalyticBound) {
    const auto s = lfm(0.02);
    const double err = max_err(recover_sinusoidal(s.tf, s.ridge), s, 0.2, 0.8);
    const double bound = error_bound_sinusoidal(1.0, 0.02, 37.0);
    EXPECT_LE(err, 1.5 * bound);
    EXPECT_GE(err, 0.5 * bound);
}

TEST(Recovery, ZeroRateReducesToSinusoidal) {
    const auto s = lfm(0.02);
    ChirpRateTrack zero{s.ridge.first_frame, std::vector<double>(s.ridge.size(), 0.0)};
    const auto a = recover_chirp(s.tf, s.ridge, zero, s.sigma);
    const auto b = recover_sinusoidal(s.tf, s.ridge);
    for (std::size_t j = 0; j < a.size(); ++j) {
        EXPECT_DOUBLE_EQ(a[j], b[j]);
    }
}

TEST(Recovery, ComplexChirpRecoveredWithPhase) {
    const double fs = 256, c = 20, r = 30, sigma = 0.03;
    ComplexSignal z;
    z.sample_rate = fs;
    for (int n = 0; n < 256; ++n) {
        const double t = n / fs;
        z.samples.push_back(std::polar(1.0, 2 * M_PI * (c * t + 0.5 * r * t * t)));
    }
    SigmaTrack sig{std::vector<double>(256, sigma)};
    const auto tf = adaptive_stft(z, sig, FrequencyGrid::fft(fs, 2048));
    const Peak p = global_peak(tf);
    const Ridge ridge = detect_ridge(tf, p, window_half_band(sigma, 0.1), 0.1 * p.magnitude);
    ChirpRateTrack chirp{ridge.first_frame, std::vector<double>(ridge.size(), r)};
    const auto rec = recover_complex(tf, ridge, chirp, sig);
    for (std::size_t n = 64; n < 192; ++n) {
        EXPECT_NEAR(std::abs(rec[n - ridge.first_frame] - z.samples[n]), 0.0, 1e-4) << n;
    }
}

TEST(Recovery, TrackAlignmentChecked) {
    const auto s = lfm(0.02);
    ChirpRateTrack shortr{s.ridge.first_frame, std::vector<double>(3, 37.0)};
    EXPECT_THROW(recover_chirp(s.tf, s.ridge, shortr, s.sigma), InvalidParameter);
    Ridge outside = s.ridge;
    outside.first_frame = 600;
    EXPECT_THROW(recover_sinusoidal(s.tf, outside), InvalidParameter);
}

TEST(Recovery, OnRecordZeroExtends) {
    RecoveredComponent c;
    c.ridge.first_frame = 2;
    c.ridge.eta = {1, 1};
    c.samples = {5.0, 6.0};
    EXPECT_EQ(c.on_record(6), (std::vector<double>{0, 0, 5, 6, 0, 0}));
    std::ostringstream os;
    c.ridge.dt = 0.5;
    write_component_csv(os, c);
    EXPECT_EQ(os.str(), "time,value\n1,5\n1.5,6\n");
}

TEST(ErrorBound, MonotoneInRateAndSigma) {
    double prev = 0.0;
    for (double r : {1.0, 10.0, 37.0, 100.0}) {
        const double b = error_bound_sinusoidal(1.0, 0.02, r);
        EXPECT_GT(b, prev);
        prev = b;
    }
    EXPECT_DOUBLE_EQ(error_bound_sinusoidal(1.0, 0.02, -37.0), error_bound_sinusoidal(1.0, 0.02, 37.0));
    EXPECT_THROW(error_bound_sinusoidal(1.0, 0.0, 1.0), InvalidParameter);
}
