#include "asso/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include "asso/errors.hpp"
#include "asso/io.hpp"
#include "asso/parallel.hpp"
#include "asso/tuning.hpp"

namespace asso {
namespace {

constexpr double pi = std::numbers::pi;

SampledSignal synthesize(const std::vector<GroundTruthComponent>& truth, double fs, std::size_t n) {
    SampledSignal x;
    x.sample_rate = fs;
    x.samples.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = x.time_at(i);
        for (const auto& c : truth) {
            x.samples[i] += c.value(t);
        }
    }
    return x;
}

// A cos(2 pi (f t + b cos(0.2 pi t))) with b in cycles.
GroundTruthComponent nonlinear_fm(double amp, double f, double b) {
    const double w = 0.2 * pi;
    GroundTruthComponent c;
    c.amplitude = [amp](double) { return amp; };
    c.phase = [=](double t) { return f * t + b * std::cos(w * t); };
    c.inst_freq = [=](double t) { return f - b * w * std::sin(w * t); };
    c.chirp_rate = [=](double t) { return -b * w * w * std::cos(w * t); };
    return c;
}

} // namespace

std::vector<double> SyntheticCase::truth_samples(std::size_t k) const {
    std::vector<double> out(signal.size());
    for (std::size_t n = 0; n < out.size(); ++n) {
        out[n] = truth.at(k).value(signal.time_at(n));
    }
    return out;
}

void SyntheticCase::validate() const {
    signal.validate();
    for (std::size_t n = 0; n < signal.size(); ++n) {
        const double t = signal.time_at(n);
        double expected = trend_truth ? trend_truth(t) : 0.0;
        for (const auto& c : truth) {
            expected += c.value(t);
        }
        if (std::abs(expected - signal.samples[n]) > 1e-12) {
            throw InvalidParameter("synthetic case '" + label + "' deviates from its analytic sum at sample " +
                                   std::to_string(n));
        }
    }
}

SyntheticCase gen_lfm(std::size_t n) {
    if (n < 2) {
        throw InvalidParameter("gen_lfm needs at least 2 samples");
    }
    GroundTruthComponent c;
    c.amplitude = [](double) { return 1.0; };
    c.phase = [](double t) { return 17.0 * t + 18.5 * t * t; };
    c.inst_freq = [](double t) { return 17.0 + 37.0 * t; };
    c.chirp_rate = [](double) { return 37.0; };
    SyntheticCase sc;
    sc.truth = {c};
    sc.signal = synthesize(sc.truth, static_cast<double>(n), n);
    sc.label = "lfm";
    return sc;
}

SyntheticCase gen_three_component(std::size_t n) {
    if (n < 2) {
        throw InvalidParameter("gen_three_component needs at least 2 samples");
    }
    SyntheticCase sc;
    sc.truth = {nonlinear_fm(1.0, 1.35, 3.0 / pi), nonlinear_fm(2.0 / 3.0, 2.35, 2.0 / pi),
                nonlinear_fm(0.5, 3.2, 1.0 / pi)};
    sc.signal = synthesize(sc.truth, static_cast<double>(n) / 20.0, n);
    sc.label = "three_component";
    return sc;
}

AssoConfig recommended_config(const SyntheticCase& c) {
    AssoConfig cfg;
    if (c.label == "three_component") {
        cfg.extract_trend = false;
        cfg.sigma_min = separation_sigma_min(0.8, cfg.tau0);
        cfg.zeta = 1.0;
        cfg.gamma1_rel = 0.4;
    } else if (c.label == "lfm") {
        cfg.extract_trend = false;
    }
    return cfg;
}

SampledSignal add_noise(const SampledSignal& x, double snr_db, std::uint64_t seed) {
    x.validate();
    if (std::isinf(snr_db) && snr_db > 0) {
        return x;
    }
    if (!std::isfinite(snr_db)) {
        throw InvalidParameter("snr_db must be finite or +inf");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> w(x.size());
    for (double& v : w) {
        v = normal(rng);
    }
    const double ps = std::inner_product(x.samples.begin(), x.samples.end(), x.samples.begin(), 0.0);
    const double pw = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
    if (ps == 0.0) {
        return x;
    }
    const double scale = std::sqrt(ps / pw / std::pow(10.0, snr_db / 10.0));
    SampledSignal y = x;
    for (std::size_t n = 0; n < y.size(); ++n) {
        y.samples[n] += scale * w[n];
    }
    return y;
}

double mse(const std::vector<std::vector<double>>& recovered, const std::vector<std::vector<double>>& truth,
           const std::vector<double>& time, double t0, double t1) {
    if (truth.empty() || recovered.size() != truth.size()) {
        throw InvalidParameter("mse needs one recovered series per truth series");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        if (truth[k].size() != time.size() || recovered[k].size() != time.size()) {
            throw InvalidParameter("mse series must share the time grid");
        }
        double num = 0.0;
        double den = 0.0;
        for (std::size_t n = 0; n < time.size(); ++n) {
            if (time[n] < t0 || time[n] > t1) {
                continue;
            }
            const double d = truth[k][n] - recovered[k][n];
            num += d * d;
            den += truth[k][n] * truth[k][n];
        }
        if (den == 0.0) {
            throw InvalidParameter("truth component " + std::to_string(k) + " vanishes on the interval");
        }
        total += std::sqrt(num / den);
    }
    return total / static_cast<double>(truth.size());
}

std::vector<std::optional<std::size_t>> assign_components(const SeparationResult& result, const SyntheticCase& c) {
    const std::size_t nt = c.truth.size();
    const std::size_t nr = result.components.size();
    const std::size_t m = std::max(nt, nr);
    // cost[k][j]: truth k vs recovered j; dummies cost nothing.
    std::vector<std::vector<double>> cost(m, std::vector<double>(m, 0.0));
    for (std::size_t k = 0; k < nt; ++k) {
        for (std::size_t j = 0; j < nr; ++j) {
            const Ridge& ridge = result.components[j].ridge;
            double acc = 0.0;
            for (std::size_t i = 0; i < ridge.size(); ++i) {
                acc += std::abs(ridge.eta[i] - c.truth[k].inst_freq(ridge.time_at(ridge.first_frame + i)));
            }
            cost[k][j] = ridge.size() > 0 ? acc / static_cast<double>(ridge.size()) : 0.0;
        }
    }
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::size_t> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            total += cost[k][perm[k]];
        }
        if (total < best_cost) {
            best_cost = total;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::vector<std::optional<std::size_t>> out(nt);
    for (std::size_t k = 0; k < nt; ++k) {
        if (best[k] < nr) {
            out[k] = best[k];
        }
    }
    return out;
}

std::vector<std::vector<double>> aligned_components(const SeparationResult& result, const SyntheticCase& c,
                                                    bool alternate) {
    const auto map = assign_components(result, c);
    const std::size_t len = result.residual.size();
    std::vector<std::vector<double>> out(c.truth.size(), std::vector<double>(len, 0.0));
    for (std::size_t k = 0; k < map.size(); ++k) {
        if (!map[k]) {
            continue;
        }
        const auto& comp = result.components[*map[k]];
        const auto& src = alternate ? result.diagnostics[*map[k]].alternate_samples : comp.samples;
        std::copy(src.begin(), src.end(), out[k].begin() + static_cast<std::ptrdiff_t>(comp.first_frame()));
    }
    return out;
}

ComparisonReport compare_models(const SyntheticCase& c, const AssoConfig& config, const std::vector<double>& snr_list,
                                std::size_t n_seeds, double t0, double t1, std::uint64_t base_seed) {
    if (snr_list.empty() || n_seeds == 0) {
        throw InvalidParameter("compare_models needs at least one SNR and one seed");
    }
    AssoConfig cfg = config;
    cfg.recovery_model = RecoveryModel::chirp;

    std::vector<std::vector<double>> truth(c.truth.size());
    for (std::size_t k = 0; k < truth.size(); ++k) {
        truth[k] = c.truth_samples(k);
    }
    std::vector<double> time(c.signal.size());
    for (std::size_t n = 0; n < time.size(); ++n) {
        time[n] = c.signal.time_at(n);
    }

    const std::size_t cells = snr_list.size() * n_seeds;
    std::vector<ComparisonRow> rows(2 * cells);
    parallel_for(0, cells, [&](std::size_t cell) {
        const double snr = snr_list[cell / n_seeds];
        const std::uint64_t seed = base_seed + cell % n_seeds;
        const SeparationResult res = separate(add_noise(c.signal, snr, seed), cfg);
        const double chirp_mse = mse(aligned_components(res, c, false), truth, time, t0, t1);
        const double sinus_mse = mse(aligned_components(res, c, true), truth, time, t0, t1);
        rows[2 * cell] = {snr, seed, RecoveryModel::chirp, chirp_mse, res.components.size()};
        rows[2 * cell + 1] = {snr, seed, RecoveryModel::sinusoidal, sinus_mse, res.components.size()};
    });

    ComparisonReport report;
    report.rows = std::move(rows);
    report.t0 = t0;
    report.t1 = t1;
    for (std::size_t s = 0; s < snr_list.size(); ++s) {
        for (RecoveryModel model : {RecoveryModel::chirp, RecoveryModel::sinusoidal}) {
            ComparisonSummary sum;
            sum.snr_db = snr_list[s];
            sum.model = model;
            std::vector<double> vals;
            for (std::size_t i = 0; i < n_seeds; ++i) {
                const auto& row = report.rows[2 * (s * n_seeds + i) + (model == RecoveryModel::chirp ? 0 : 1)];
                vals.push_back(row.mse);
            }
            sum.count = vals.size();
            sum.mean = std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(vals.size());
            if (vals.size() > 1) {
                double ss = 0.0;
                for (double v : vals) {
                    ss += (v - sum.mean) * (v - sum.mean);
                }
                sum.stddev = std::sqrt(ss / static_cast<double>(vals.size() - 1));
            }
            report.summary.push_back(sum);
        }
    }
    return report;
}

std::pair<double, double> evaluation_interval(const SyntheticCase& c) {
    if (c.label == "lfm") {
        return {0.2, 0.8};
    }
    if (c.label == "three_component") {
        return {2.5, 17.5};
    }
    return {c.signal.start_time, c.signal.time_at(c.signal.size() - 1)};
}

void write_report_csv(std::ostream& os, const ComparisonReport& report) {
    os << "snr_db,seed,model,mse\n";
    for (const auto& r : report.rows) {
        os << format_double(r.snr_db) << ',' << r.seed << ',' << to_string(r.model) << ',' << format_double(r.mse)
           << '\n';
    }
}

void write_summary_csv(std::ostream& os, const ComparisonReport& report) {
    os << "snr_db,model,mean,std,count\n";
    for (const auto& s : report.summary) {
        os << format_double(s.snr_db) << ',' << to_string(s.model) << ',' << format_double(s.mean) << ','
           << format_double(s.stddev) << ',' << s.count << '\n';
    }
}

} // namespace asso
