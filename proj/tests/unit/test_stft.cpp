#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <sstream>

#include "asso/errors.hpp"
#include "asso/stft.hpp"
#include "helpers.hpp"

using namespace asso;
using asso::test::naive_stft;
using asso::test::random_signal;
using asso::test::sample;

namespace {

double max_abs(std::span<const cplx> v) {
    double m = 0.0;
    for (const cplx& c : v) {
        m = std::max(m, std::abs(c));
    }
    return m;
}

} // namespace

TEST(FrequencyGrid, FftGridLayout) {
    const auto g = FrequencyGrid::fft(25.6, 4096);
    EXPECT_EQ(g.count, 2049u);
    EXPECT_DOUBLE_EQ(g.spacing, 25.6 / 4096);
    EXPECT_DOUBLE_EQ(g.last(), 12.8);
    EXPECT_TRUE(g.is_canonical_for(25.6));
    EXPECT_FALSE(g.is_canonical_for(512));
    EXPECT_EQ(g.nearest_bin(3.0), 480u);
    EXPECT_FALSE(FrequencyGrid::uniform(0, 0.1, 10).is_canonical_for(25.6));
    EXPECT_THROW(FrequencyGrid::fft(0, 16), InvalidParameter);
}

TEST(FrequencyGrid, DefaultFftSize) {
    // sigma 0.02 s at 512 Hz: L = floor(5 * 0.02 * 512) = 51, support 103, 4x = 412 -> 512.
    EXPECT_EQ(window_half_length(0.02, 512, 5), 51u);
    EXPECT_EQ(default_fft_size(512, 0.02, 5), 512u);
    const std::size_t m = default_fft_size(25.6, 2.5, 5);
    EXPECT_TRUE(std::has_single_bit(m));
    EXPECT_GE(m, 4 * (2 * window_half_length(2.5, 25.6, 5) + 1));
    EXPECT_LT(m / 2, 4 * (2 * window_half_length(2.5, 25.6, 5) + 1));
    EXPECT_GE(default_fft_size(100, 0.001, 5), 16u);
}

TEST(StftFrame, DirectPathMatchesIndependentSum) {
    const auto x = random_signal(7, 100.0, 300);
    const auto grid = FrequencyGrid::fft(100.0, 256);
    for (std::size_t n : {0u, 5u, 150u, 299u}) {
        const auto v = stft_frame(x, n, 0.1, grid, 5.0, StftMethod::direct);
        for (std::size_t i = 0; i < grid.count; i += 17) {
            EXPECT_NEAR(std::abs(v[i] - naive_stft(x, n, 0.1, grid.at(i))), 0.0, 1e-13);
        }
    }
}

TEST(StftFrame, FftPathMatchesDirectSum) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto x = random_signal(seed, 64.0 + static_cast<double>(seed), 200);
        const double sigma = 0.05 + 0.01 * static_cast<double>(seed);
        const auto grid = FrequencyGrid::fft(x.sample_rate, default_fft_size(x.sample_rate, sigma, 5));
        for (std::size_t n : {0u, 3u, 100u, 199u}) {
            const auto fast = stft_frame(x, n, sigma, grid);
            const auto slow = stft_frame(x, n, sigma, grid, 5.0, StftMethod::direct);
            double err = 0.0;
            for (std::size_t i = 0; i < grid.count; ++i) {
                err = std::max(err, std::abs(fast[i] - slow[i]));
            }
            EXPECT_LE(err, 1e-9 * max_abs(slow)) << seed << " " << n;
        }
    }
}

TEST(StftFrame, FftSmallerThanSupportStillExact) {
    // Taps wrap modulo M; sampling the DTFT on the M-point grid is unaffected.
    const auto x = random_signal(3, 50.0, 200);
    const auto grid = FrequencyGrid::fft(50.0, 32);
    const auto fast = stft_frame(x, 100, 0.2, grid);
    for (std::size_t i = 0; i < grid.count; ++i) {
        EXPECT_NEAR(std::abs(fast[i] - naive_stft(x, 100, 0.2, grid.at(i))), 0.0, 1e-12);
    }
}

TEST(StftFrame, NonCanonicalGridUsesDirectSum) {
    const auto x = random_signal(11, 80.0, 160);
    const auto grid = FrequencyGrid::uniform(3.3, 0.77, 40);
    const auto v = stft_frame(x, 80, 0.15, grid);
    for (std::size_t i = 0; i < grid.count; ++i) {
        EXPECT_NEAR(std::abs(v[i] - naive_stft(x, 80, 0.15, grid.at(i))), 0.0, 1e-13);
    }
}

TEST(StftFrame, DegenerateWindowThrows) {
    const auto x = random_signal(1, 10.0, 50);
    const auto grid = FrequencyGrid::fft(10.0, 16);
    EXPECT_THROW(stft_frame(x, 10, 0.01, grid), DegenerateWindow);
    EXPECT_THROW(stft_frame(x, 10, 0.0, grid), InvalidParameter);
    EXPECT_THROW(stft_frame(x, 50, 0.5, grid), InvalidParameter);
}

TEST(StftFrame, ToneRidgeAtToneFrequency) {
    const double fs = 128, f0 = 12.0;
    const auto x = sample([&](double t) { return std::cos(2 * M_PI * f0 * t); }, fs, 512);
    const auto grid = FrequencyGrid::fft(fs, 1024);
    const auto v = stft_frame(x, 256, 0.1, grid);
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.count; ++i) {
        if (std::abs(v[i]) > std::abs(v[best])) {
            best = i;
        }
    }
    EXPECT_DOUBLE_EQ(grid.at(best), f0);
    EXPECT_NEAR(std::abs(v[best]), 0.5, 1e-6);
}

TEST(StftFrame, ComplexExponential) {
    const double fs = 100, f0 = 7.5;
    ComplexSignal z;
    z.sample_rate = fs;
    for (int n = 0; n < 400; ++n) {
        z.samples.push_back(std::polar(1.0, 2 * M_PI * f0 * n / fs));
    }
    const auto grid = FrequencyGrid::fft(fs, 400);
    const auto v = stft_frame(z, 200, 0.2, grid);
    const cplx expected = std::polar(1.0, 2 * M_PI * f0 * 2.0);
    EXPECT_NEAR(std::abs(v[grid.nearest_bin(f0)] - expected), 0.0, 1e-6);
}

TEST(AdaptiveStft, ColumnsUseTheirOwnSigma) {
    const auto x = random_signal(5, 64.0, 256);
    const auto grid = FrequencyGrid::fft(64.0, 512);
    SigmaTrack track;
    for (int n = 0; n < 100; ++n) {
        track.values.push_back(0.1 + 0.002 * n);
    }
    const auto tf = adaptive_stft(x, track, grid, 50);
    EXPECT_EQ(tf.first_frame, 50u);
    EXPECT_EQ(tf.frame_count(), 100u);
    EXPECT_DOUBLE_EQ(tf.time_grid[0], 50 / 64.0);
    for (std::size_t n : {50u, 77u, 149u}) {
        const auto ref = stft_frame(x, n, track[n - 50], grid);
        const auto row = tf.row(n);
        for (std::size_t i = 0; i < grid.count; ++i) {
            EXPECT_EQ(row[i], ref[i]);
        }
    }
    EXPECT_THROW(adaptive_stft(x, track, grid, 200), InvalidParameter);
}

TEST(AdaptiveStft, Linearity) {
    const auto a = random_signal(1, 40.0, 120);
    const auto b = random_signal(2, 40.0, 120);
    SampledSignal c = a;
    for (std::size_t n = 0; n < c.size(); ++n) {
        c.samples[n] = 2.5 * a.samples[n] - 0.75 * b.samples[n];
    }
    SigmaTrack track{std::vector<double>(120, 0.2)};
    const auto grid = FrequencyGrid::fft(40.0, 256);
    const auto ta = adaptive_stft(a, track, grid);
    const auto tb = adaptive_stft(b, track, grid);
    const auto tc = adaptive_stft(c, track, grid);
    for (std::size_t i = 0; i < tc.values.size(); ++i) {
        EXPECT_NEAR(std::abs(tc.values[i] - (2.5 * ta.values[i] - 0.75 * tb.values[i])), 0.0, 1e-13);
    }
}

TEST(AdaptiveStft, LinearChirpMatchesClosedForm) {
    const double fs = 512;
    for (double r : {37.0, -20.0, 60.0, 10.0, 90.0}) {
        const double c = 60.0;
        const auto x = sample([&](double t) { return std::cos(2 * M_PI * (c * t + 0.5 * r * t * t)); }, fs, 512);
        const double sigma = 0.02;
        const auto grid = FrequencyGrid::fft(fs, 1024);
        const auto tf = adaptive_stft(x, SigmaTrack{std::vector<double>(512, sigma)}, grid);
        for (std::size_t n = 128; n <= 384; n += 64) {
            const double t = n / fs;
            double worst = 0.0;
            double peak = 0.0;
            for (std::size_t i = 1; i < grid.count - 1; ++i) {
                const cplx ref = chirp_stft_closed_form(1.0, c, r, t, grid.at(i), sigma);
                worst = std::max(worst, std::abs(tf.at(n, i) - ref));
                peak = std::max(peak, std::abs(ref));
            }
            EXPECT_LE(worst, 1e-3 * peak) << r << " " << n;
        }
    }
}

TEST(Reconstruct, RandomSignalRoundTripOnCanonicalGrid) {
    const auto x = random_signal(9, 50.0, 300);
    const auto grid = FrequencyGrid::fft(50.0, 128);
    const auto tf = adaptive_stft(x, SigmaTrack{std::vector<double>(300, 0.3)}, grid);
    for (std::size_t n = 0; n < 300; n += 13) {
        EXPECT_NEAR(reconstruct_real(tf, n), x.samples[n], 1e-12);
    }
}

TEST(Reconstruct, OddFftLength) {
    const auto x = random_signal(4, 30.0, 100);
    const auto grid = FrequencyGrid::fft(30.0, 45);
    const auto tf = adaptive_stft(x, SigmaTrack{std::vector<double>(100, 0.2)}, grid);
    EXPECT_NEAR(reconstruct_real(tf, 50), x.samples[50], 1e-12);
}

TEST(Reconstruct, ToneOnCoarseQuadratureGrid) {
    // Uniform grid not tied to the FFT: plain trapezoid quadrature, accurate
    // when the grid resolves the window's spectrum.
    const double fs = 100;
    const auto x = sample([](double t) { return std::cos(2 * M_PI * 10 * t); }, fs, 400);
    const auto grid = FrequencyGrid::uniform(0.0, 0.05, 1001);
    const auto tf = adaptive_stft(x, SigmaTrack{std::vector<double>(1, 0.2)}, grid, 200);
    EXPECT_NEAR(reconstruct_real(tf, 200), x.samples[200], 1e-3);
}

TEST(Reconstruct, ZeroAndLinearity) {
    SampledSignal z;
    z.sample_rate = 20;
    z.samples.assign(60, 0.0);
    const auto grid = FrequencyGrid::fft(20, 64);
    const auto tz = adaptive_stft(z, SigmaTrack{std::vector<double>(60, 0.3)}, grid);
    EXPECT_EQ(reconstruct_real(tz, 30), 0.0);

    const auto a = random_signal(1, 20, 60);
    SampledSignal b = a;
    for (double& v : b.samples) {
        v *= -3.0;
    }
    const auto ta = adaptive_stft(a, SigmaTrack{std::vector<double>(60, 0.3)}, grid);
    const auto tb = adaptive_stft(b, SigmaTrack{std::vector<double>(60, 0.3)}, grid);
    EXPECT_NEAR(reconstruct_real(tb, 30), -3.0 * reconstruct_real(ta, 30), 1e-12);
}

TEST(Trend, ConstantRecoveredAtMidRecord) {
    SampledSignal x;
    x.sample_rate = 25.6;
    x.samples.assign(512, 0.5);
    const auto tr = extract_trend(x, 0.234375);
    EXPECT_NEAR(tr[256], 0.5, 1e-6);
}

TEST(Trend, LeakageBelowThresholdForSeparatedTone) {
    // f0 well beyond lambda_1 + lambda_0: the tone leaks less than 2 tau0.
    const double sigma = 0.234375, fs = 25.6;
    const double f0 = 3.0;
    ASSERT_GT(f0, 2 * window_half_band(sigma, 0.1));
    const auto x = sample([&](double t) { return 0.5 + std::cos(2 * M_PI * f0 * t); }, fs, 512);
    const auto tr = extract_trend(x, sigma);
    EXPECT_NEAR(tr[256], 0.5, 2 * 0.1);
    EXPECT_NEAR(tr[256], 0.5, 1e-3);
}

TEST(Trend, ZeroAndInvalid) {
    SampledSignal z;
    z.sample_rate = 10;
    z.samples.assign(40, 0.0);
    for (double v : extract_trend(z, 0.5)) {
        EXPECT_EQ(v, 0.0);
    }
    EXPECT_THROW(extract_trend(z, 0.0), InvalidParameter);
    EXPECT_THROW(extract_trend(z, 0.01), DegenerateWindow);
}

TEST(AssoDiscrete, WindowSumApproachesScale) {
    // Poisson summation: sum_n h(n/a) = a (1 + 2 exp(-2 pi^2 a^2) + ...) for large a.
    // Truncated at 5a, Euler-Maclaurin: integral over [-5, 5], half of each
    // endpoint term, and the first derivative correction.
    const double h = 1.0 / 64, g5 = std::exp(-12.5) / std::sqrt(2 * M_PI);
    const double expect = std::erf(5.0 / std::sqrt(2.0)) + h * g5 - h * h / 12 * 10 * g5;
    EXPECT_NEAR(asso_window_sum(64.0) / 64.0, expect, 1e-13);
    EXPECT_NEAR(asso_window_sum(1.0), 1.0 + 2 * std::exp(-2 * M_PI * M_PI), 1e-6);
}

TEST(AssoDiscrete, MatchesStftWithScaledWindow) {
    const double fs = 25.6;
    const auto x = sample([](double t) { return std::cos(2 * M_PI * 1.35 * t + 6 * std::cos(0.2 * M_PI * t)); }, fs, 512);
    const double a = 64, delta = 1 / fs;
    const auto grid = FrequencyGrid::fft(fs, 4096);
    const auto tf = adaptive_stft(x, SigmaTrack{std::vector<double>(1, a * delta)}, grid, 256);
    const auto row = tf.row(256);
    const double vmax = max_abs(row);
    for (std::size_t i = 0; i < grid.count; i += 8) {
        EXPECT_NEAR(std::abs(asso_discrete(x, 256, a, delta, grid.at(i)) - row[i]), 0.0, 1e-2 * vmax);
    }
    EXPECT_THROW(asso_discrete(x, 256, a, 0.5 / fs, 1.0), InvalidParameter);
}

TEST(TfCsv, HeaderAndRowCount) {
    const auto x = random_signal(2, 10.0, 20);
    const auto grid = FrequencyGrid::fft(10.0, 16);
    const auto tf = adaptive_stft(x, SigmaTrack{std::vector<double>(3, 0.3)}, grid, 5);
    std::ostringstream os;
    write_tf_csv(os, tf);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "time,freq,re,im,abs");
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        ++rows;
    }
    EXPECT_EQ(rows, 3u * grid.count);
}
