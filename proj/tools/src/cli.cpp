#include "asso_cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "asso/bench.hpp"
#include "asso/errors.hpp"
#include "asso/io.hpp"
#include "asso/logging.hpp"
#include "asso/parallel.hpp"
#include "asso/pipeline.hpp"
#include "asso/stft.hpp"
#include "asso/tuning.hpp"
#include "json.hpp"

#ifndef ASSO_VERSION
#define ASSO_VERSION "unknown"
#endif

namespace asso::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Stopwatch {
public:
    explicit Stopwatch(std::vector<StageTiming>& sink) : sink_(sink) {}

    void lap(const std::string& stage) {
        const auto now = std::chrono::steady_clock::now();
        sink_.push_back({stage, std::chrono::duration<double>(now - last_).count()});
        last_ = now;
    }

private:
    std::vector<StageTiming>& sink_;
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    return out;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
    }
}

fs::path sibling(const fs::path& path, const std::string& suffix) {
    return path.parent_path() / (path.stem().string() + suffix + ".csv");
}

void write_manifest(const fs::path& dir, RunManifest& m) {
    m.outputs.push_back("manifest.json");
    auto out = open_out(dir / "manifest.json");
    out << m.to_json() << '\n';
}

SyntheticCase make_case(const std::string& name, std::size_t samples) {
    if (name == "lfm") {
        return gen_lfm(samples);
    }
    if (name == "three_component") {
        return gen_three_component(samples);
    }
    throw UsageError("unknown case '" + name + "' (expected lfm or three_component)");
}

// Truth CSV (time, s1..sK, if1..ifK) as a SyntheticCase whose IFs are looked
// up at the nearest sample.
SyntheticCase case_from_truth(const fs::path& path, const SampledSignal& grid) {
    const CsvTable table = read_csv(path);
    SyntheticCase c;
    c.signal = grid;
    c.label = "truth";
    for (std::size_t k = 1;; ++k) {
        const std::string s = "s" + std::to_string(k);
        const std::string f = "if" + std::to_string(k);
        if (!table.has_column(s) || !table.has_column(f)) {
            break;
        }
        const auto values = std::make_shared<std::vector<double>>(table.column(s));
        const auto freqs = std::make_shared<std::vector<double>>(table.column(f));
        if (values->size() != grid.size()) {
            throw IoError(path.string() + ": truth length differs from the signal");
        }
        const double t0 = grid.start_time;
        const double rate = grid.sample_rate;
        const auto index = [t0, rate, n = values->size()](double t) {
            const double i = std::round((t - t0) * rate);
            return static_cast<std::size_t>(std::clamp(i, 0.0, static_cast<double>(n - 1)));
        };
        GroundTruthComponent g;
        g.amplitude = [values, index](double t) { return (*values)[index(t)]; };
        g.phase = [](double) { return 0.0; };
        g.inst_freq = [freqs, index](double t) { return (*freqs)[index(t)]; };
        g.chirp_rate = [](double) { return 0.0; };
        c.truth.push_back(std::move(g));
    }
    if (c.truth.empty()) {
        throw IoError(path.string() + ": no s1/if1 columns");
    }
    return c;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::io: return exit_io;
    case ErrorKind::config: return exit_config;
    case ErrorKind::invalid_parameter: return exit_usage;
    default: return exit_numeric;
    }
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) {
            continue;
        }
        if (item == "inf" || item == "+inf") {
            out.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) {
            throw UsageError("bad number '" + item + "' in list");
        }
        out.push_back(v);
    }
    return out;
}

} // namespace

std::string tool_version() { return ASSO_VERSION; }

std::string RunManifest::to_json() const {
    json stages_json = json::array();
    for (const auto& s : stages) {
        stages_json.push_back({{"stage", s.stage}, {"seconds", s.seconds}});
    }
    json doc = {
        {"tool", "asso"},
        {"tool_version", tool_version},
        {"command", command},
        {"input", input},
        {"config", config_text},
        {"component_count", component_count},
        {"stop_reasons", stop_reasons},
        {"outputs", outputs},
        {"stages", stages_json},
    };
    if (!result_json.empty()) {
        doc["result"] = json::parse(result_json);
    }
    return doc.dump(2);
}

std::vector<fs::path> cmd_synth(const SynthOptions& opt) {
    SyntheticCase c = make_case(opt.case_name, opt.samples);
    if (opt.snr_db) {
        c.signal = add_noise(c.signal, *opt.snr_db, opt.seed);
    }
    if (!opt.out_path.parent_path().empty()) {
        ensure_dir(opt.out_path.parent_path());
    }
    {
        auto out = open_out(opt.out_path);
        write_signal_csv(out, c.signal);
    }

    std::vector<std::string> header{"time"};
    std::vector<std::vector<double>> cols;
    std::vector<double> time(c.signal.size());
    for (std::size_t n = 0; n < time.size(); ++n) {
        time[n] = c.signal.time_at(n);
    }
    for (std::size_t k = 0; k < c.truth.size(); ++k) {
        header.push_back("s" + std::to_string(k + 1));
        cols.push_back(c.truth_samples(k));
    }
    for (std::size_t k = 0; k < c.truth.size(); ++k) {
        header.push_back("if" + std::to_string(k + 1));
        std::vector<double> f(time.size());
        for (std::size_t n = 0; n < f.size(); ++n) {
            f[n] = c.truth[k].inst_freq(time[n]);
        }
        cols.push_back(std::move(f));
    }
    std::vector<const std::vector<double>*> ptrs{&time};
    for (const auto& col : cols) {
        ptrs.push_back(&col);
    }
    const fs::path truth_path = sibling(opt.out_path, "_truth");
    write_csv_file(truth_path, header, ptrs);
    return {opt.out_path, truth_path};
}

std::vector<fs::path> cmd_stft(const StftOptions& opt) {
    const SampledSignal x = read_signal(opt.in_path, opt.sample_rate);
    AssoConfig base;
    if (opt.config_path) {
        base = load_config(*opt.config_path);
    }
    if (opt.sigma && !(*opt.sigma > 0.0)) {
        throw UsageError("--sigma must be positive");
    }
    if (opt.sigma) {
        base.sigma_min = base.sigma_max = *opt.sigma;
    }
    const AssoConfig cfg = resolve_config(base, x.sample_rate, x.size());
    const FrequencyGrid grid = FrequencyGrid::fft(x.sample_rate, cfg.freq_bins);

    SigmaTrack track;
    if (opt.sigma) {
        track.values.assign(x.size(), *opt.sigma);
    } else {
        const SigmaTrack raw = select_global_sigma(x, sigma_grid(cfg), cfg.zeta, grid, cfg.truncation_radius);
        track.values = smooth_track(raw.values, cfg.smooth_len);
    }
    const TFRepresentation tf = adaptive_stft(x, track, grid, 0, cfg.truncation_radius);

    if (!opt.out_path.parent_path().empty()) {
        ensure_dir(opt.out_path.parent_path());
    }
    {
        auto out = open_out(opt.out_path);
        write_tf_csv(out, tf);
    }
    const fs::path sigma_path = sibling(opt.out_path, "_sigma");
    write_csv_file(sigma_path, {"time", "sigma"}, {&tf.time_grid, &track.values});
    return {opt.out_path, sigma_path};
}

std::vector<fs::path> cmd_separate(const SeparateOptions& opt) {
    RunManifest m;
    m.command = "separate";
    m.input = opt.in_path.string();
    m.tool_version = tool_version();
    Stopwatch clock(m.stages);

    const SampledSignal x = read_signal(opt.in_path, opt.sample_rate);
    const AssoConfig cfg = opt.config_path ? load_config(*opt.config_path) : AssoConfig{};
    clock.lap("read");

    const SeparationResult result = separate(x, cfg);
    clock.lap("separate");

    ensure_dir(opt.out_dir);
    m.outputs = write_separation_bundle(opt.out_dir, result);
    if (opt.truth_path) {
        const SyntheticCase truth = case_from_truth(*opt.truth_path, x);
        const auto aligned = aligned_components(result, truth);
        std::vector<double> idx;
        std::vector<double> err;
        std::vector<double> time(x.size());
        for (std::size_t n = 0; n < time.size(); ++n) {
            time[n] = x.time_at(n);
        }
        for (std::size_t k = 0; k < truth.truth.size(); ++k) {
            idx.push_back(static_cast<double>(k + 1));
            err.push_back(mse({aligned[k]}, {truth.truth_samples(k)}, time, time.front(), time.back()));
        }
        write_csv_file(opt.out_dir / "metrics.csv", {"truth_component", "relative_l2"}, {&idx, &err});
        m.outputs.push_back("metrics.csv");
    }
    clock.lap("write");

    m.config_text = serialize_config(result.config_used);
    m.component_count = result.components.size();
    m.stop_reasons = {to_string(result.stop_reason)};
    m.result_json = separation_manifest_json(result);
    write_manifest(opt.out_dir, m);

    std::vector<fs::path> files;
    for (const auto& f : m.outputs) {
        files.push_back(opt.out_dir / f);
    }
    return files;
}

std::vector<fs::path> cmd_bench(const BenchOptions& opt) {
    if (opt.snr_db.empty()) {
        throw UsageError("bench needs at least one SNR");
    }
    if (opt.seeds == 0) {
        throw UsageError("bench needs at least one seed");
    }
    RunManifest m;
    m.command = "bench";
    m.input = opt.case_name;
    m.tool_version = tool_version();
    Stopwatch clock(m.stages);

    const SyntheticCase c = make_case(opt.case_name, 512);
    AssoConfig cfg = recommended_config(c);
    if (opt.config_path) {
        cfg = load_config(*opt.config_path, cfg);
    }
    const auto [t0, t1] = evaluation_interval(c);
    const ComparisonReport report = compare_models(c, cfg, opt.snr_db, opt.seeds, t0, t1, opt.seed);
    clock.lap("compare");

    ensure_dir(opt.out_dir);
    {
        auto out = open_out(opt.out_dir / "report.csv");
        write_report_csv(out, report);
    }
    {
        auto out = open_out(opt.out_dir / "summary.csv");
        write_summary_csv(out, report);
    }
    m.outputs = {"report.csv", "summary.csv"};
    clock.lap("write");
    m.config_text = serialize_config(cfg);
    write_manifest(opt.out_dir, m);
    return {opt.out_dir / "report.csv", opt.out_dir / "summary.csv", opt.out_dir / "manifest.json"};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Adaptive STFT signal separation", "asso"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version());

    std::size_t threads = 0;
    std::uint64_t seed = 1;
    app.add_option("--threads", threads, "Worker thread cap (0 = all cores)");
    app.add_option("--seed", seed, "Random seed for noise and benchmarks");

    SynthOptions synth;
    std::optional<double> synth_snr;
    auto* c_synth = app.add_subcommand("synth", "Write a synthetic signal and its ground truth");
    c_synth->add_option("case", synth.case_name, "lfm or three_component")->required();
    c_synth->add_option("-o,--out", synth.out_path, "Signal CSV path")->required();
    c_synth->add_option("--samples", synth.samples, "Sample count")->check(CLI::PositiveNumber);
    c_synth->add_option("--snr", synth_snr, "Add white Gaussian noise at this SNR (dB)");

    StftOptions stft;
    std::optional<double> stft_sigma;
    std::optional<std::string> stft_config;
    std::optional<double> stft_fs;
    bool stft_auto = false;
    auto* c_stft = app.add_subcommand("stft", "Adaptive STFT of a signal");
    c_stft->add_option("input", stft.in_path, "Signal CSV or WAV")->required();
    c_stft->add_option("-o,--out", stft.out_path, "TF CSV path")->required();
    auto* o_sigma = c_stft->add_option("--sigma", stft_sigma, "Constant window width (s)");
    auto* o_auto = c_stft->add_flag("--auto", stft_auto, "Entropy-selected time-varying window");
    o_sigma->excludes(o_auto);
    c_stft->add_option("--config", stft_config, "Config file");
    c_stft->add_option("--fs", stft_fs, "Sample rate for CSV input");

    SeparateOptions sep;
    std::optional<std::string> sep_config;
    std::optional<std::string> sep_truth;
    std::optional<double> sep_fs;
    auto* c_sep = app.add_subcommand("separate", "Separate trend, components and residual");
    c_sep->add_option("input", sep.in_path, "Signal CSV or WAV")->required();
    c_sep->add_option("-o,--out", sep.out_dir, "Output directory")->required();
    c_sep->add_option("--config", sep_config, "Config file");
    c_sep->add_option("--truth", sep_truth, "Ground-truth CSV from synth");
    c_sep->add_option("--fs", sep_fs, "Sample rate for CSV input");

    BenchOptions bench;
    std::string bench_snr = "10,15,20";
    std::optional<std::string> bench_config;
    auto* c_bench = app.add_subcommand("bench", "Chirp vs sinusoidal recovery under noise");
    c_bench->add_option("-o,--out", bench.out_dir, "Output directory")->required();
    c_bench->add_option("--case", bench.case_name, "lfm or three_component");
    c_bench->add_option("--config", bench_config, "Config file");
    c_bench->add_option("--snr", bench_snr, "Comma-separated SNR list (dB)");
    c_bench->add_option("--seeds", bench.seeds, "Seeds per SNR");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        set_max_threads(threads);
        std::vector<fs::path> files;
        if (*c_synth) {
            synth.snr_db = synth_snr;
            synth.seed = seed;
            files = cmd_synth(synth);
        } else if (*c_stft) {
            if (!stft_sigma && !stft_auto) {
                throw UsageError("stft needs --sigma or --auto");
            }
            stft.sigma = stft_sigma;
            stft.sample_rate = stft_fs;
            if (stft_config) {
                stft.config_path = *stft_config;
            }
            files = cmd_stft(stft);
        } else if (*c_sep) {
            sep.sample_rate = sep_fs;
            if (sep_config) {
                sep.config_path = *sep_config;
            }
            if (sep_truth) {
                sep.truth_path = *sep_truth;
            }
            files = cmd_separate(sep);
        } else if (*c_bench) {
            bench.snr_db = parse_list(bench_snr);
            bench.seed = seed;
            if (bench_config) {
                bench.config_path = *bench_config;
            }
            files = cmd_bench(bench);
        }
        for (const auto& f : files) {
            out << f.string() << '\n';
        }
        return exit_ok;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const Error& e) {
        err << to_string(e.kind()) << " error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_numeric;
    }
}

} // namespace asso::cli
