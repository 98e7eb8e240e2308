#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "asso/core.hpp"
#include "asso/pipeline.hpp"

namespace asso {

struct SyntheticCase {
    SampledSignal signal;
    std::vector<GroundTruthComponent> truth;
    std::function<double(double)> trend_truth; // empty when the case has no trend
    std::string label;

    // Component k evaluated on the signal grid.
    std::vector<double> truth_samples(std::size_t k) const;
    // Throws InvalidParameter unless samples match the analytic sum within 1e-12.
    void validate() const;
};

/// cos(34 pi t + 37 pi t^2) on t_n = n / N, n < N (IF 17 + 37 t Hz, chirp rate 37 Hz/s).
SyntheticCase gen_lfm(std::size_t n = 512);

/// Three nonlinear FM modes on [0, 20), Fs = N / 20:
///   cos(2.7 pi t + 6 cos(0.2 pi t)) + 2/3 cos(4.7 pi t + 4 cos(0.2 pi t)) + 1/2 cos(6.4 pi t + 2 cos(0.2 pi t)).
SyntheticCase gen_three_component(std::size_t n = 512);

// Pipeline settings matched to a generated case. "three_component" has no
// trend and a 0.8 Hz minimum IF gap: trend removal off, sigma_min from
// separation_sigma_min, zeta = 1 s, gamma1_rel = 0.4. "lfm": trend removal off.
// Anything else gets the defaults.
AssoConfig recommended_config(const SyntheticCase& c);

// Adds white Gaussian noise scaled so the empirical SNR over the record equals
// snr_db exactly. An infinite snr_db returns x unchanged.
SampledSignal add_noise(const SampledSignal& x, double snr_db, std::uint64_t seed);

/// Mean relative L2 error (1/K) sum_k ||s_k - s~_k|| / ||s_k|| over samples with
/// t0 <= t <= t1. All series share the grid `time`.
double mse(const std::vector<std::vector<double>>& recovered, const std::vector<std::vector<double>>& truth,
           const std::vector<double>& time, double t0, double t1);

/// Maps each truth component to the recovered component whose ridge tracks its
/// IF most closely (mean |eta - phi'| over the ridge support), choosing the
/// one-to-one assignment with the smallest total distance. Truth components
/// left without a partner map to nullopt.
std::vector<std::optional<std::size_t>> assign_components(const SeparationResult& result, const SyntheticCase& c);

// Recovered series aligned with the truth order (zeros for unmatched truth
// components). `alternate` selects ComponentDiagnostics::alternate_samples.
std::vector<std::vector<double>> aligned_components(const SeparationResult& result, const SyntheticCase& c,
                                                    bool alternate = false);

struct ComparisonRow {
    double snr_db = 0.0;
    std::uint64_t seed = 0;
    RecoveryModel model = RecoveryModel::chirp;
    double mse = 0.0;
    std::size_t components = 0;
};

struct ComparisonSummary {
    double snr_db = 0.0;
    RecoveryModel model = RecoveryModel::chirp;
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation; 0 for a single seed
    std::size_t count = 0;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;         // (snr, seed) order, chirp then sinusoidal
    std::vector<ComparisonSummary> summary;  // snr order, chirp then sinusoidal
    double t0 = 0.0;
    double t1 = 0.0;
};

/// For every SNR and seed base_seed .. base_seed + n_seeds - 1: noise the case,
/// run one extraction, and score both recovery formulas on the shared ridges
/// and sigma tracks over [t0, t1]. Cells run in parallel.
ComparisonReport compare_models(const SyntheticCase& c, const AssoConfig& config, const std::vector<double>& snr_list,
                                std::size_t n_seeds, double t0, double t1, std::uint64_t base_seed = 1);

// Evaluation interval conventionally used for a case label ("lfm": [0.2, 0.8],
// "three_component": [2.5, 17.5]); the full record otherwise.
std::pair<double, double> evaluation_interval(const SyntheticCase& c);

void write_report_csv(std::ostream& os, const ComparisonReport& report);  // snr_db,seed,model,mse
void write_summary_csv(std::ostream& os, const ComparisonReport& report); // snr_db,model,mean,std,count

} // namespace asso
