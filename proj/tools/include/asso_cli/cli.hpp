#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace asso::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 2,
    exit_io = 3,
    exit_config = 4,
    exit_numeric = 5,
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

// Written as manifest.json next to the outputs of every command.
struct RunManifest {
    std::string command;
    std::string input;
    std::string config_text; // serialized config actually used
    std::size_t component_count = 0;
    std::vector<std::string> stop_reasons;
    std::vector<std::string> outputs; // file names relative to the manifest
    std::string tool_version;
    std::vector<StageTiming> stages;
    std::string result_json; // command-specific payload, may be empty

    std::string to_json() const;
};

std::string tool_version();

struct SynthOptions {
    std::string case_name; // "lfm" or "three_component"
    std::filesystem::path out_path;
    std::size_t samples = 512;
    std::optional<double> snr_db;
    std::uint64_t seed = 1;
};

// Signal CSV at out_path, truth CSV (time, s1..sK, if1..ifK) at <stem>_truth.csv.
std::vector<std::filesystem::path> cmd_synth(const SynthOptions& opt);

struct StftOptions {
    std::filesystem::path in_path;
    std::filesystem::path out_path;
    std::optional<double> sigma; // constant window; unset means --auto
    std::optional<std::filesystem::path> config_path;
    std::optional<double> sample_rate;
};

// TF CSV at out_path and the sigma track at <stem>_sigma.csv.
std::vector<std::filesystem::path> cmd_stft(const StftOptions& opt);

struct SeparateOptions {
    std::filesystem::path in_path;
    std::optional<std::filesystem::path> config_path;
    std::filesystem::path out_dir;
    std::optional<std::filesystem::path> truth_path;
    std::optional<double> sample_rate;
};

// Result bundle plus manifest.json; metrics.csv when a truth file is given.
std::vector<std::filesystem::path> cmd_separate(const SeparateOptions& opt);

struct BenchOptions {
    std::string case_name = "three_component";
    std::optional<std::filesystem::path> config_path;
    std::filesystem::path out_dir;
    std::vector<double> snr_db{10.0, 15.0, 20.0};
    std::size_t seeds = 10;
    std::uint64_t seed = 1;
};

// report.csv, summary.csv and manifest.json in out_dir.
std::vector<std::filesystem::path> cmd_bench(const BenchOptions& opt);

/// Parses argv, dispatches a subcommand and maps failures to exit codes:
/// 2 usage, 3 I/O, 4 config, 5 numeric degeneracy.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace asso::cli
