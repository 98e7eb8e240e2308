#include "asso/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include "json.hpp"

#include "asso/errors.hpp"
#include "asso/io.hpp"
#include "asso/logging.hpp"

namespace asso {
namespace {

double energy(std::span<const double> s) {
    double e = 0.0;
    for (double v : s) {
        e += v * v;
    }
    return e;
}

SigmaTrack slice(const SigmaTrack& t, std::size_t first, std::size_t len) {
    return {std::vector<double>(t.values.begin() + static_cast<std::ptrdiff_t>(first),
                                t.values.begin() + static_cast<std::ptrdiff_t>(first + len))};
}

std::vector<std::size_t> fit_widths(const AssoConfig& cfg, const SigmaTrack& sigma, double fs) {
    std::vector<std::size_t> w(sigma.size());
    for (std::size_t j = 0; j < sigma.size(); ++j) {
        w[j] = cfg.fit_halfwidth_samples > 0 ? cfg.fit_halfwidth_samples
                                              : default_fit_halfwidth(sigma[j], cfg.tau0, fs);
    }
    return w;
}

ChirpRateTrack chirp_track_for(const AssoConfig& cfg, const Ridge& ridge, const SigmaTrack& sigma, double fs) {
    ChirpRateTrack track = estimate_chirp_track(ridge, fit_widths(cfg, sigma, fs));
    if (cfg.smooth_chirp_rate) {
        track.r = smooth_track(track.r, cfg.smooth_len);
    }
    return track;
}

} // namespace

std::string to_string(StopReason r) {
    switch (r) {
    case StopReason::below_threshold: return "below_threshold";
    case StopReason::max_components: return "max_components";
    case StopReason::no_peak: return "no_peak";
    case StopReason::empty_ridge: return "empty_ridge";
    case StopReason::undefined_entropy: return "undefined_entropy";
    case StopReason::degenerate_window: return "degenerate_window";
    }
    return "unknown";
}

std::vector<double> SeparationResult::reassemble() const {
    std::vector<double> out(residual.size(), 0.0);
    for (std::size_t n = 0; n < out.size(); ++n) {
        out[n] = trend[n];
    }
    for (const auto& c : components) {
        for (std::size_t j = 0; j < c.samples.size(); ++j) {
            out[c.first_frame() + j] += c.samples[j];
        }
    }
    for (std::size_t n = 0; n < out.size(); ++n) {
        out[n] += residual[n];
    }
    return out;
}

std::vector<double> smooth_track(std::span<const double> track, std::size_t smooth_len) {
    if (smooth_len == 0 || smooth_len % 2 == 0) {
        throw InvalidParameter("smooth_len must be odd and >= 1");
    }
    const std::size_t half = smooth_len / 2;
    const std::size_t n = track.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(n - 1, i + half);
        double acc = 0.0;
        for (std::size_t k = lo; k <= hi; ++k) {
            acc += track[k];
        }
        out[i] = acc / static_cast<double>(hi - lo + 1);
    }
    return out;
}

AssoConfig resolve_config(const AssoConfig& cfg, double sample_rate, std::size_t length) {
    cfg.validate();
    AssoConfig r = cfg;
    const double duration = static_cast<double>(length) / sample_rate;
    if (r.sigma_min == 0.0) {
        r.sigma_min = 6.0 / sample_rate;
    }
    if (r.sigma_max == 0.0) {
        r.sigma_max = std::max(r.sigma_min, duration / 8.0);
    }
    if (r.sigma_min > r.sigma_max) {
        throw ConfigError("sigma_min exceeds sigma_max for this signal");
    }
    if (r.zeta == 0.0) {
        r.zeta = 8.0 * r.sigma_max;
    }
    if (r.trend_sigma == 0.0) {
        r.trend_sigma = r.sigma_min;
    }
    if (r.freq_bins == 0) {
        r.freq_bins = default_fft_size(sample_rate, r.sigma_max, r.truncation_radius);
    }
    if (r.freq_bins < 2) {
        throw ConfigError("freq_bins must be at least 2");
    }
    if (r.delta_sigma == 0.0) {
        const auto grid = sigma_grid(r);
        r.delta_sigma = grid.size() > 1 ? (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1)
                                        : 0.5 * r.sigma_min;
    }
    return r;
}

std::vector<double> sigma_grid(const AssoConfig& resolved) {
    if (resolved.sigma_step > 0.0) {
        return linear_sigma_grid(resolved.sigma_min, resolved.sigma_max, resolved.sigma_step);
    }
    return log_sigma_grid(resolved.sigma_min, resolved.sigma_max, resolved.sigma_count);
}

SeparationResult separate(const SampledSignal& x, const AssoConfig& config) {
    x.validate();
    const AssoConfig cfg = resolve_config(config, x.sample_rate, x.size());
    const double fs = x.sample_rate;
    const std::size_t len = x.size();
    const FrequencyGrid grid = FrequencyGrid::fft(fs, cfg.freq_bins);
    const std::vector<double> sigmas = sigma_grid(cfg);

    SeparationResult result;
    result.sample_rate = fs;
    result.start_time = x.start_time;
    result.config_used = cfg;
    result.trend.assign(len, 0.0);

    const auto stop = [&](StopReason reason, const std::string& detail) {
        result.stop_reason = reason;
        result.stop_detail = detail;
        log::info("extraction stopped: " + to_string(reason) + (detail.empty() ? "" : " (" + detail + ")"));
    };

    try {
        if (cfg.extract_trend) {
            result.trend = extract_trend(x, cfg.trend_sigma, cfg.truncation_radius);
        }
    } catch (const DegenerateWindow& e) {
        result.residual = x.samples;
        stop(StopReason::degenerate_window, e.what());
        return result;
    }

    SampledSignal s = x;
    for (std::size_t n = 0; n < len; ++n) {
        s.samples[n] = x.samples[n] - result.trend[n];
    }

    double gamma1 = 0.0;
    double gamma2 = 0.0;
    for (std::size_t p = 0;; ++p) {
        if (p == cfg.max_components) {
            stop(StopReason::max_components, "");
            break;
        }
        try {
            const SigmaTrack raw = select_global_sigma(s, sigmas, cfg.zeta, grid, cfg.truncation_radius);
            const SigmaTrack sigma_r{smooth_track(raw.values, cfg.smooth_len)};
            const TFRepresentation tf = adaptive_stft(s, sigma_r, grid, 0, cfg.truncation_radius);
            const Peak peak = global_peak(tf);
            if (p == 0) {
                gamma1 = cfg.gamma1_rel * peak.magnitude;
                gamma2 = cfg.gamma2_rel * peak.magnitude;
            }
            if (!(peak.magnitude > gamma1)) {
                stop(StopReason::below_threshold, "");
                break;
            }

            std::vector<double> bands(len);
            for (std::size_t n = 0; n < len; ++n) {
                bands[n] = window_half_band(sigma_r[n], cfg.tau0, cfg.lambda_convention);
            }
            const Ridge ridge = detect_ridge(tf, peak, bands, gamma2);
            const SigmaTrack sigma_r_support = slice(sigma_r, ridge.first_frame, ridge.size());

            Ridge ridge_used = ridge;
            SigmaTrack sigma_used = sigma_r_support;
            std::vector<std::size_t> iterations(ridge.size(), 0);
            if (cfg.refine_sigma) {
                const ChirpRateTrack coarse = chirp_track_for(cfg, ridge, sigma_r_support, fs);
                LocalSigmaOptions opts;
                opts.delta_sigma = cfg.delta_sigma;
                opts.er_epsilon = cfg.er_epsilon;
                opts.tau0 = cfg.tau0;
                opts.sigma_min = cfg.sigma_min;
                opts.truncation_radius = cfg.truncation_radius;
                opts.convention = cfg.lambda_convention;
                LocalRefinement refined = refine_local_sigma(s, ridge, sigma_r_support, coarse, grid, opts);
                ridge_used = std::move(refined.ridge);
                sigma_used = std::move(refined.sigma);
                iterations = std::move(refined.iterations);
            }

            const TFRepresentation tf_p = adaptive_stft(s, sigma_used, grid, ridge.first_frame, cfg.truncation_radius);
            const ChirpRateTrack chirp = chirp_track_for(cfg, ridge_used, sigma_used, fs);

            std::vector<double> chirp_rec = recover_chirp(tf_p, ridge_used, chirp, sigma_used);
            std::vector<double> sinus_rec = recover_sinusoidal(tf_p, ridge_used);
            const bool use_chirp = cfg.recovery_model == RecoveryModel::chirp;

            RecoveredComponent comp;
            comp.samples = use_chirp ? std::move(chirp_rec) : std::move(sinus_rec);
            comp.ridge = ridge_used;
            comp.chirp_track = chirp;
            comp.sigma_track_used = sigma_used;

            ComponentDiagnostics diag;
            diag.peak = peak;
            diag.initial_ridge = ridge;
            diag.sigma_global = sigma_r_support;
            diag.sigma_local = sigma_used;
            diag.refine_iterations = std::move(iterations);
            diag.alternate_samples = use_chirp ? std::move(sinus_rec) : std::move(chirp_rec);
            const std::span<double> support(s.samples.data() + ridge.first_frame, ridge.size());
            diag.energy_before = energy(support);
            for (std::size_t j = 0; j < comp.samples.size(); ++j) {
                support[j] -= comp.samples[j];
            }
            diag.energy_after = energy(support);

            log::info("component " + std::to_string(p + 1) + ": peak " + format_double(peak.magnitude) + " at " +
                      format_double(peak.freq) + " Hz, support " + std::to_string(ridge.size()) + " frames");
            result.components.push_back(std::move(comp));
            result.diagnostics.push_back(std::move(diag));
        } catch (const UndefinedEntropy& e) {
            stop(StopReason::undefined_entropy, e.what());
            break;
        } catch (const NoPeak& e) {
            stop(StopReason::no_peak, e.what());
            break;
        } catch (const EmptyRidge& e) {
            stop(StopReason::empty_ridge, e.what());
            break;
        } catch (const DegenerateWindow& e) {
            stop(StopReason::degenerate_window, e.what());
            break;
        }
    }
    result.residual = std::move(s.samples);
    return result;
}

std::string separation_manifest_json(const SeparationResult& result) {
    using nlohmann::json;
    const AssoConfig& c = result.config_used;
    json cfg = {
        {"tau0", c.tau0},
        {"truncation_radius", c.truncation_radius},
        {"gamma1_rel", c.gamma1_rel},
        {"gamma2_rel", c.gamma2_rel},
        {"sigma_min", c.sigma_min},
        {"sigma_max", c.sigma_max},
        {"sigma_step", c.sigma_step},
        {"sigma_count", c.sigma_count},
        {"delta_sigma", c.delta_sigma},
        {"zeta", c.zeta},
        {"er_epsilon", c.er_epsilon},
        {"smooth_len", c.smooth_len},
        {"max_components", c.max_components},
        {"freq_bins", c.freq_bins},
        {"fit_halfwidth_samples", c.fit_halfwidth_samples},
        {"extract_trend", c.extract_trend},
        {"trend_sigma", c.trend_sigma},
        {"recovery_model", to_string(c.recovery_model)},
        {"refine_sigma", c.refine_sigma},
        {"smooth_chirp_rate", c.smooth_chirp_rate},
        {"lambda_convention", to_string(c.lambda_convention)},
    };
    json comps = json::array();
    for (std::size_t k = 0; k < result.components.size(); ++k) {
        const auto& comp = result.components[k];
        const auto& d = result.diagnostics[k];
        const auto [smin, smax] = std::minmax_element(d.sigma_local.values.begin(), d.sigma_local.values.end());
        comps.push_back({
            {"index", k + 1},
            {"peak_time", comp.ridge.time_at(d.peak.frame)},
            {"peak_freq", d.peak.freq},
            {"peak_magnitude", d.peak.magnitude},
            {"support_start", comp.ridge.time_at(comp.first_frame())},
            {"support_end", comp.ridge.time_at(comp.end_frame() - 1)},
            {"support_frames", comp.samples.size()},
            {"sigma_local_min", *smin},
            {"sigma_local_max", *smax},
            {"energy_before", d.energy_before},
            {"energy_after", d.energy_after},
        });
    }
    json doc = {
        {"sample_rate", result.sample_rate},
        {"start_time", result.start_time},
        {"samples", result.residual.size()},
        {"component_count", result.components.size()},
        {"stop_reason", to_string(result.stop_reason)},
        {"stop_detail", result.stop_detail},
        {"config", cfg},
        {"components", comps},
    };
    return doc.dump(2);
}

std::vector<std::string> write_separation_bundle(const std::filesystem::path& dir, const SeparationResult& result) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    const std::size_t len = result.residual.size();
    std::vector<double> time(len);
    for (std::size_t n = 0; n < len; ++n) {
        time[n] = result.start_time + static_cast<double>(n) / result.sample_rate;
    }

    std::vector<std::string> files;
    const auto emit_series = [&](const std::string& name, const std::vector<double>& values) {
        write_csv_file(dir / name, {"time", "value"}, {&time, &values});
        files.push_back(name);
    };
    emit_series("trend.csv", result.trend);
    emit_series("residual.csv", result.residual);

    for (std::size_t k = 0; k < result.components.size(); ++k) {
        const auto& comp = result.components[k];
        const std::string idx = std::to_string(k + 1);
        {
            const std::string name = "component_" + idx + ".csv";
            std::ofstream out(dir / name);
            if (!out) {
                throw IoError("cannot write " + (dir / name).string());
            }
            write_component_csv(out, comp);
            files.push_back(name);
        }
        {
            const std::string name = "sigma_" + idx + ".csv";
            std::vector<double> t(comp.samples.size());
            for (std::size_t j = 0; j < t.size(); ++j) {
                t[j] = comp.ridge.time_at(comp.first_frame() + j);
            }
            write_csv_file(dir / name, {"time", "sigma_global", "sigma_local"},
                           {&t, &result.diagnostics[k].sigma_global.values, &comp.sigma_track_used.values});
            files.push_back(name);
        }
    }

    {
        std::ofstream out(dir / "ridges.csv");
        if (!out) {
            throw IoError("cannot write " + (dir / "ridges.csv").string());
        }
        out << "component,time,eta,magnitude,r\n";
        for (std::size_t k = 0; k < result.components.size(); ++k) {
            const auto& comp = result.components[k];
            for (std::size_t j = 0; j < comp.samples.size(); ++j) {
                out << (k + 1) << ',' << format_double(comp.ridge.time_at(comp.first_frame() + j)) << ','
                    << format_double(comp.ridge.eta[j]) << ',' << format_double(comp.ridge.magnitude[j]) << ','
                    << format_double(comp.chirp_track.r[j]) << '\n';
            }
        }
        files.push_back("ridges.csv");
    }
    return files;
}

} // namespace asso
