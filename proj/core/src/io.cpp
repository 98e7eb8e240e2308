#include "asso/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "asso/errors.hpp"

namespace asso {
namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, sep)) {
        out.push_back(trim(cell));
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) {
        return std::nullopt;
    }
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) {
        return std::nullopt;
    }
    return v;
}

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::ostream& os, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        os.put(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}

void put_u16(std::ostream& os, std::uint16_t v) {
    os.put(static_cast<char>(v & 0xff));
    os.put(static_cast<char>((v >> 8) & 0xff));
}

} // namespace

std::string format_double(double v) {
    std::array<char, 40> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

bool CsvTable::has_column(const std::string& name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
}

std::size_t CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    throw IoError("CSV has no column named '" + name + "'");
}

CsvTable parse_csv(std::istream& is, const std::string& source_name) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (trim(line).empty()) {
            continue;
        }
        if (table.header.empty()) {
            table.header = split(line, ',');
            table.columns.resize(table.header.size());
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != table.header.size()) {
            throw IoError(source_name + ":" + std::to_string(line_no) + ": expected " +
                          std::to_string(table.header.size()) + " fields, got " + std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto v = parse_number(cells[c]);
            if (!v) {
                throw IoError(source_name + ":" + std::to_string(line_no) + ": not a number: '" + cells[c] + "'");
            }
            table.columns[c].push_back(*v);
        }
    }
    if (table.header.empty()) {
        throw IoError(source_name + ": empty CSV");
    }
    return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return parse_csv(in, path.string());
}

void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<const std::vector<double>*>& columns) {
    if (header.size() != columns.size()) {
        throw InvalidParameter("CSV header and column count differ");
    }
    const std::size_t rows = columns.empty() ? 0 : columns.front()->size();
    for (const auto* col : columns) {
        if (col->size() != rows) {
            throw InvalidParameter("CSV columns differ in length");
        }
    }
    for (std::size_t c = 0; c < header.size(); ++c) {
        os << (c ? "," : "") << header[c];
    }
    os << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            os << (c ? "," : "") << format_double((*columns[c])[r]);
        }
        os << '\n';
    }
}

void write_csv_file(const std::filesystem::path& path, const std::vector<std::string>& header,
                    const std::vector<const std::vector<double>*>& columns) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    write_csv(out, header, columns);
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

SampledSignal read_signal_csv(const std::filesystem::path& path, std::optional<double> sample_rate) {
    const CsvTable table = read_csv(path);
    const auto& time = table.column("time");
    const auto& value = table.column("value");
    if (value.size() < 2) {
        throw IoError(path.string() + ": need at least 2 samples");
    }
    SampledSignal x;
    x.samples = value;
    x.start_time = time.front();
    if (sample_rate) {
        x.sample_rate = *sample_rate;
    } else {
        const double span = time.back() - time.front();
        if (!(span > 0.0)) {
            throw IoError(path.string() + ": time column must increase");
        }
        const double estimate = static_cast<double>(time.size() - 1) / span;
        // Time stamps are printed rates like 25.6 Hz run through n / fs; snap
        // back to the short decimal so round trips reproduce fs exactly.
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", estimate);
        const double snapped = std::strtod(buf, nullptr);
        x.sample_rate = estimate;
        bool fits = true;
        for (std::size_t n = 0; n < time.size(); ++n) {
            const double expected = x.start_time + static_cast<double>(n) / snapped;
            if (std::abs(time[n] - expected) > 1e-6 / estimate) {
                fits = false;
                break;
            }
        }
        if (fits) {
            x.sample_rate = snapped;
        } else {
            for (std::size_t n = 1; n < time.size(); ++n) {
                if (std::abs(time[n] - time[n - 1] - 1.0 / estimate) > 1e-3 / estimate) {
                    throw IoError(path.string() + ": time column is not uniformly sampled");
                }
            }
        }
    }
    x.validate();
    return x;
}

void write_signal_csv(std::ostream& os, const SampledSignal& x) {
    std::vector<double> time(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        time[n] = x.time_at(n);
    }
    write_csv(os, {"time", "value"}, {&time, &x.samples});
}

SampledSignal read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::string(bytes.begin(), bytes.begin() + 4) != "RIFF" ||
        std::string(bytes.begin() + 8, bytes.begin() + 12) != "WAVE") {
        throw IoError(path.string() + ": not a RIFF/WAVE file");
    }

    std::uint16_t channels = 0;
    std::uint16_t bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    const unsigned char* data = nullptr;
    std::size_t data_len = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::string id(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                             bytes.begin() + static_cast<std::ptrdiff_t>(pos + 4));
        const std::size_t len = read_u32(&bytes[pos + 4]);
        const std::size_t body = pos + 8;
        if (body + len > bytes.size()) {
            throw IoError(path.string() + ": truncated '" + id + "' chunk");
        }
        if (id == "fmt ") {
            if (len < 16) {
                throw IoError(path.string() + ": short fmt chunk");
            }
            std::uint16_t format = read_u16(&bytes[body]);
            channels = read_u16(&bytes[body + 2]);
            rate = read_u32(&bytes[body + 4]);
            bits = read_u16(&bytes[body + 14]);
            if (format == 0xFFFE && len >= 26) {
                format = read_u16(&bytes[body + 24]); // WAVE_FORMAT_EXTENSIBLE sub-format
            }
            if (format != 1) {
                throw IoError(path.string() + ": only PCM WAV is supported");
            }
            have_fmt = true;
        } else if (id == "data") {
            data = &bytes[body];
            data_len = len;
        }
        pos = body + len + (len & 1);
    }
    if (!have_fmt || data == nullptr) {
        throw IoError(path.string() + ": missing fmt or data chunk");
    }
    if (channels != 1) {
        throw IoError(path.string() + ": expected mono audio, got " + std::to_string(channels) + " channels");
    }
    if (bits != 16 && bits != 24) {
        throw IoError(path.string() + ": only 16- and 24-bit PCM are supported");
    }

    const std::size_t width = bits / 8;
    SampledSignal x;
    x.sample_rate = rate;
    x.samples.reserve(data_len / width);
    for (std::size_t off = 0; off + width <= data_len; off += width) {
        std::int32_t v = 0;
        if (bits == 16) {
            v = static_cast<std::int16_t>(read_u16(data + off));
            x.samples.push_back(static_cast<double>(v) / 32768.0);
        } else {
            v = static_cast<std::int32_t>(static_cast<std::uint32_t>(data[off]) << 8 |
                                          static_cast<std::uint32_t>(data[off + 1]) << 16 |
                                          static_cast<std::uint32_t>(data[off + 2]) << 24) >>
                8;
            x.samples.push_back(static_cast<double>(v) / 8388608.0);
        }
    }
    x.validate();
    return x;
}

void write_wav_pcm16(const std::filesystem::path& path, const SampledSignal& x) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    const auto rate = static_cast<std::uint32_t>(std::lround(x.sample_rate));
    const auto data_len = static_cast<std::uint32_t>(x.size() * 2);
    out.write("RIFF", 4);
    put_u32(out, 36 + data_len);
    out.write("WAVEfmt ", 8);
    put_u32(out, 16);
    put_u16(out, 1);
    put_u16(out, 1);
    put_u32(out, rate);
    put_u32(out, rate * 2);
    put_u16(out, 2);
    put_u16(out, 16);
    out.write("data", 4);
    put_u32(out, data_len);
    for (double v : x.samples) {
        const double clipped = std::clamp(v, -1.0, 32767.0 / 32768.0);
        put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(clipped * 32768.0))));
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

SampledSignal read_signal(const std::filesystem::path& path, std::optional<double> sample_rate) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".wav") {
        return read_wav(path);
    }
    return read_signal_csv(path, sample_rate);
}

namespace {

using Setter = std::function<void(AssoConfig&, const std::string&)>;

double as_double(const std::string& key, const std::string& v) {
    const auto d = parse_number(v);
    if (!d || !std::isfinite(*d)) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
    }
    return *d;
}

std::size_t as_size(const std::string& key, const std::string& v) {
    std::size_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + v + "'");
    }
    return out;
}

bool as_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config key '" + key + "': expected true/false, got '" + v + "'");
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"tau0", [](AssoConfig& c, const std::string& v) { c.tau0 = as_double("tau0", v); }},
        {"truncation_radius",
         [](AssoConfig& c, const std::string& v) { c.truncation_radius = as_double("truncation_radius", v); }},
        {"gamma1_rel", [](AssoConfig& c, const std::string& v) { c.gamma1_rel = as_double("gamma1_rel", v); }},
        {"gamma2_rel", [](AssoConfig& c, const std::string& v) { c.gamma2_rel = as_double("gamma2_rel", v); }},
        {"sigma_min", [](AssoConfig& c, const std::string& v) { c.sigma_min = as_double("sigma_min", v); }},
        {"sigma_max", [](AssoConfig& c, const std::string& v) { c.sigma_max = as_double("sigma_max", v); }},
        {"sigma_step", [](AssoConfig& c, const std::string& v) { c.sigma_step = as_double("sigma_step", v); }},
        {"sigma_count", [](AssoConfig& c, const std::string& v) { c.sigma_count = as_size("sigma_count", v); }},
        {"delta_sigma", [](AssoConfig& c, const std::string& v) { c.delta_sigma = as_double("delta_sigma", v); }},
        {"zeta", [](AssoConfig& c, const std::string& v) { c.zeta = as_double("zeta", v); }},
        {"er_epsilon", [](AssoConfig& c, const std::string& v) { c.er_epsilon = as_double("er_epsilon", v); }},
        {"smooth_len", [](AssoConfig& c, const std::string& v) { c.smooth_len = as_size("smooth_len", v); }},
        {"max_components",
         [](AssoConfig& c, const std::string& v) { c.max_components = as_size("max_components", v); }},
        {"freq_bins", [](AssoConfig& c, const std::string& v) { c.freq_bins = as_size("freq_bins", v); }},
        {"fit_halfwidth_samples",
         [](AssoConfig& c, const std::string& v) { c.fit_halfwidth_samples = as_size("fit_halfwidth_samples", v); }},
        {"extract_trend", [](AssoConfig& c, const std::string& v) { c.extract_trend = as_bool("extract_trend", v); }},
        {"trend_sigma", [](AssoConfig& c, const std::string& v) { c.trend_sigma = as_double("trend_sigma", v); }},
        {"recovery_model",
         [](AssoConfig& c, const std::string& v) {
             if (v == "chirp") {
                 c.recovery_model = RecoveryModel::chirp;
             } else if (v == "sinusoidal") {
                 c.recovery_model = RecoveryModel::sinusoidal;
             } else {
                 throw ConfigError("config key 'recovery_model': expected chirp or sinusoidal, got '" + v + "'");
             }
         }},
        {"refine_sigma", [](AssoConfig& c, const std::string& v) { c.refine_sigma = as_bool("refine_sigma", v); }},
        {"smooth_chirp_rate",
         [](AssoConfig& c, const std::string& v) { c.smooth_chirp_rate = as_bool("smooth_chirp_rate", v); }},
        {"lambda_convention",
         [](AssoConfig& c, const std::string& v) {
             if (v == "dimensional") {
                 c.lambda_convention = LambdaConvention::dimensional;
             } else if (v == "verbatim") {
                 c.lambda_convention = LambdaConvention::verbatim;
             } else {
                 throw ConfigError("config key 'lambda_convention': expected dimensional or verbatim, got '" + v +
                                   "'");
             }
         }},
    };
    return table;
}

} // namespace

AssoConfig parse_config(std::istream& is, const AssoConfig& base) {
    AssoConfig cfg = base;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        it->second(cfg, value);
    }
    cfg.validate();
    return cfg;
}

AssoConfig load_config(const std::filesystem::path& path, const AssoConfig& base) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config " + path.string());
    }
    return parse_config(in, base);
}

std::string serialize_config(const AssoConfig& c) {
    std::ostringstream os;
    const auto b = [](bool v) { return v ? "true" : "false"; };
    os << "tau0 = " << format_double(c.tau0) << '\n'
       << "truncation_radius = " << format_double(c.truncation_radius) << '\n'
       << "gamma1_rel = " << format_double(c.gamma1_rel) << '\n'
       << "gamma2_rel = " << format_double(c.gamma2_rel) << '\n'
       << "sigma_min = " << format_double(c.sigma_min) << '\n'
       << "sigma_max = " << format_double(c.sigma_max) << '\n'
       << "sigma_step = " << format_double(c.sigma_step) << '\n'
       << "sigma_count = " << c.sigma_count << '\n'
       << "delta_sigma = " << format_double(c.delta_sigma) << '\n'
       << "zeta = " << format_double(c.zeta) << '\n'
       << "er_epsilon = " << format_double(c.er_epsilon) << '\n'
       << "smooth_len = " << c.smooth_len << '\n'
       << "max_components = " << c.max_components << '\n'
       << "freq_bins = " << c.freq_bins << '\n'
       << "fit_halfwidth_samples = " << c.fit_halfwidth_samples << '\n'
       << "extract_trend = " << b(c.extract_trend) << '\n'
       << "trend_sigma = " << format_double(c.trend_sigma) << '\n'
       << "recovery_model = " << to_string(c.recovery_model) << '\n'
       << "refine_sigma = " << b(c.refine_sigma) << '\n'
       << "smooth_chirp_rate = " << b(c.smooth_chirp_rate) << '\n'
       << "lambda_convention = " << to_string(c.lambda_convention) << '\n';
    return os.str();
}

} // namespace asso
