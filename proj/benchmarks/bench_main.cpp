#include <benchmark/benchmark.h>

#include "asso/bench.hpp"
#include "asso/pipeline.hpp"
#include "asso/stft.hpp"
#include "asso/tuning.hpp"

using namespace asso;

namespace {

const SyntheticCase& three() {
    static const SyntheticCase c = gen_three_component();
    return c;
}

void BM_StftFrame(benchmark::State& state) {
    const auto& x = three().signal;
    const double sigma = static_cast<double>(state.range(0)) / x.sample_rate;
    const auto grid = FrequencyGrid::fft(x.sample_rate, default_fft_size(x.sample_rate, sigma, 5.0));
    const auto method = state.range(1) ? StftMethod::direct : StftMethod::automatic;
    for (auto _ : state) {
        benchmark::DoNotOptimize(stft_frame(x, 256, sigma, grid, 5.0, method));
    }
}
BENCHMARK(BM_StftFrame)->ArgsProduct({{8, 32, 64}, {0, 1}})->ArgNames({"sigma_samples", "direct"});

void BM_AdaptiveStft(benchmark::State& state) {
    const auto& x = three().signal;
    const SigmaTrack track{std::vector<double>(x.size(), 0.7)};
    const auto grid = FrequencyGrid::fft(x.sample_rate, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(adaptive_stft(x, track, grid));
    }
}
BENCHMARK(BM_AdaptiveStft)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_EntropyProfile(benchmark::State& state) {
    const auto& x = three().signal;
    const auto grid = FrequencyGrid::fft(x.sample_rate, 1024);
    const auto sigmas = log_sigma_grid(0.3, 2.5, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(entropy_profile(x, sigmas, 1.0, grid, 5.0));
    }
}
BENCHMARK(BM_EntropyProfile)->Arg(8)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_Separate(benchmark::State& state) {
    const auto cfg = recommended_config(three());
    for (auto _ : state) {
        benchmark::DoNotOptimize(separate(three().signal, cfg));
    }
}
BENCHMARK(BM_Separate)->Unit(benchmark::kSecond)->Iterations(1);

} // namespace

BENCHMARK_MAIN();
