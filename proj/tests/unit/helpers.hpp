#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "asso/core.hpp"

namespace asso::test {

inline SampledSignal sample(const std::function<double(double)>& f, double fs, std::size_t n) {
    SampledSignal x;
    x.sample_rate = fs;
    x.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        x.samples[i] = f(static_cast<double>(i) / fs);
    }
    return x;
}

inline SampledSignal random_signal(std::uint64_t seed, double fs, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SampledSignal x;
    x.sample_rate = fs;
    x.samples.resize(n);
    for (double& v : x.samples) {
        v = u(rng);
    }
    return x;
}

// Direct evaluation of sum_k x[n+k] g(k/fs) e^{-j 2 pi eta k / fs} / fs, written
// independently of the library.
inline cplx naive_stft(const SampledSignal& x, std::size_t n, double sigma, double eta, double radius = 5.0) {
    const double fs = x.sample_rate;
    const auto L = static_cast<long>(std::floor(radius * sigma * fs));
    cplx acc{};
    for (long k = -L; k <= L; ++k) {
        const long idx = static_cast<long>(n) + k;
        if (idx < 0 || idx >= static_cast<long>(x.size())) {
            continue;
        }
        const double t = static_cast<double>(k) / fs;
        const double g = std::exp(-t * t / (2 * sigma * sigma)) / (sigma * std::sqrt(2 * M_PI));
        acc += x.samples[static_cast<std::size_t>(idx)] * g * std::polar(1.0, -2 * M_PI * eta * t) / fs;
    }
    return acc;
}

} // namespace asso::test
