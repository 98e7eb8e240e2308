#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "asso/core.hpp"

namespace asso {

// 17 significant digits: every double survives a text round trip.
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
    bool has_column(const std::string& name) const;
    // Index of a named column; throws IoError when absent.
    std::size_t column_index(const std::string& name) const;
    const std::vector<double>& column(const std::string& name) const { return columns[column_index(name)]; }
};

// Numeric CSV with a single header row. Throws IoError on unreadable files or
// malformed rows.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::istream& is, const std::string& source_name = "<stream>");

// Writes `header` followed by rows assembled column-wise. All columns must share a length.
void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<const std::vector<double>*>& columns);
void write_csv_file(const std::filesystem::path& path, const std::vector<std::string>& header,
                    const std::vector<const std::vector<double>*>& columns);

// Signal CSV: header "time,value". The sample rate is taken from `sample_rate`
// when given, otherwise from the spacing of the time column.
SampledSignal read_signal_csv(const std::filesystem::path& path, std::optional<double> sample_rate = std::nullopt);
void write_signal_csv(std::ostream& os, const SampledSignal& x);

// Mono PCM WAV, 16- or 24-bit, scaled to [-1, 1).
SampledSignal read_wav(const std::filesystem::path& path);
void write_wav_pcm16(const std::filesystem::path& path, const SampledSignal& x);

// Reads by extension: .wav through read_wav, anything else as signal CSV.
SampledSignal read_signal(const std::filesystem::path& path, std::optional<double> sample_rate = std::nullopt);

// Flat "key = value" configuration mirroring AssoConfig field names. Blank
// lines and '#' comments are ignored; every key is optional. Unknown keys and
// unparsable values throw ConfigError. Keys absent from the file keep their
// value from `base`.
AssoConfig parse_config(std::istream& is, const AssoConfig& base = {});
AssoConfig load_config(const std::filesystem::path& path, const AssoConfig& base = {});
std::string serialize_config(const AssoConfig& cfg);

} // namespace asso
