#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "asso/bench.hpp"
#include "asso/errors.hpp"
#include "asso/io.hpp"

using namespace asso;
namespace fs = std::filesystem;

namespace {

fs::path tmp(const std::string& name) { return fs::temp_directory_path() / ("asso_io_" + name); }

} // namespace

TEST(FormatDouble, RoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 25.6, 0.0}) {
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
    EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Csv, ParseAndErrors) {
    std::istringstream ok("a,b\n1,2\n3,4.5\n");
    const auto t = parse_csv(ok);
    EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(t.rows(), 2u);
    EXPECT_EQ(t.column("b")[1], 4.5);
    EXPECT_TRUE(t.has_column("a"));
    EXPECT_FALSE(t.has_column("c"));
    EXPECT_THROW(t.column("c"), IoError);
    std::istringstream ragged("a,b\n1\n");
    EXPECT_THROW(parse_csv(ragged), IoError);
    std::istringstream junk("a\nx\n");
    EXPECT_THROW(parse_csv(junk), IoError);
    EXPECT_THROW(read_csv(tmp("does_not_exist.csv")), IoError);
}

TEST(SignalCsv, RoundTripIsExact) {
    const auto x = gen_three_component().signal;
    const auto path = tmp("sig.csv");
    {
        std::ofstream out(path);
        write_signal_csv(out, x);
    }
    const auto y = read_signal_csv(path);
    EXPECT_EQ(y.samples, x.samples);
    EXPECT_EQ(y.sample_rate, 25.6);
    EXPECT_EQ(y.start_time, 0.0);
    EXPECT_EQ(read_signal_csv(path, 100.0).sample_rate, 100.0);
    fs::remove(path);
}

TEST(SignalCsv, NonUniformTimeRejected) {
    const auto path = tmp("bad.csv");
    {
        std::ofstream out(path);
        out << "time,value\n0,1\n1,2\n5,3\n";
    }
    EXPECT_THROW(read_signal_csv(path), IoError);
    fs::remove(path);
}

TEST(Wav, Pcm16RoundTrip) {
    SampledSignal x;
    x.sample_rate = 8000;
    for (int n = 0; n < 800; ++n) {
        x.samples.push_back(0.8 * std::sin(2 * M_PI * 440 * n / 8000.0));
    }
    const auto path = tmp("tone.wav");
    write_wav_pcm16(path, x);
    const auto y = read_signal(path);
    EXPECT_EQ(y.sample_rate, 8000.0);
    ASSERT_EQ(y.size(), x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        EXPECT_NEAR(y.samples[n], x.samples[n], 1.0 / 32768);
    }
    fs::remove(path);
}

TEST(Wav, Pcm24Read) {
    // Hand-built 24-bit mono header with three samples: 0, +max/2, -max.
    const auto path = tmp("s24.wav");
    {
        std::ofstream out(path, std::ios::binary);
        const auto u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
        const auto u16 = [&](std::uint16_t v) { out.write(reinterpret_cast<const char*>(&v), 2); };
        out.write("RIFF", 4);
        u32(36 + 9);
        out.write("WAVEfmt ", 8);
        u32(16);
        u16(1);
        u16(1);
        u32(1000);
        u32(3000);
        u16(3);
        u16(24);
        out.write("data", 4);
        u32(9);
        const unsigned char data[9] = {0, 0, 0, 0x00, 0x00, 0x40, 0x00, 0x00, 0x80};
        out.write(reinterpret_cast<const char*>(data), 9);
    }
    const auto y = read_wav(path);
    EXPECT_EQ(y.sample_rate, 1000.0);
    ASSERT_EQ(y.size(), 3u);
    EXPECT_DOUBLE_EQ(y.samples[0], 0.0);
    EXPECT_DOUBLE_EQ(y.samples[1], 0.5);
    EXPECT_DOUBLE_EQ(y.samples[2], -1.0);
    fs::remove(path);
}

TEST(Wav, RejectsGarbage) {
    const auto path = tmp("junk.wav");
    {
        std::ofstream out(path, std::ios::binary);
        out << "not a wav file at all";
    }
    EXPECT_THROW(read_wav(path), IoError);
    fs::remove(path);
}

TEST(Config, ParseOverridesAndRoundTrip) {
    std::istringstream in("# comment\nsigma_min = 0.5\n  zeta=2 # trailing\nrecovery_model = sinusoidal\n"
                          "extract_trend = false\nlambda_convention = verbatim\n\n");
    const auto cfg = parse_config(in);
    EXPECT_EQ(cfg.sigma_min, 0.5);
    EXPECT_EQ(cfg.zeta, 2.0);
    EXPECT_EQ(cfg.recovery_model, RecoveryModel::sinusoidal);
    EXPECT_FALSE(cfg.extract_trend);
    EXPECT_EQ(cfg.lambda_convention, LambdaConvention::verbatim);
    EXPECT_EQ(cfg.tau0, 0.1);

    std::istringstream again(serialize_config(cfg));
    const auto back = parse_config(again);
    EXPECT_EQ(serialize_config(back), serialize_config(cfg));
}

TEST(Config, OverlaysBase) {
    AssoConfig base;
    base.zeta = 1.0;
    base.extract_trend = false;
    std::istringstream in("gamma1_rel = 0.5\n");
    const auto cfg = parse_config(in, base);
    EXPECT_EQ(cfg.zeta, 1.0);
    EXPECT_FALSE(cfg.extract_trend);
    EXPECT_EQ(cfg.gamma1_rel, 0.5);
}

TEST(Config, Errors) {
    const auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return parse_config(in);
    };
    EXPECT_THROW(parse("bogus = 1\n"), ConfigError);
    EXPECT_THROW(parse("zeta = abc\n"), ConfigError);
    EXPECT_THROW(parse("zeta\n"), ConfigError);
    EXPECT_THROW(parse("extract_trend = maybe\n"), ConfigError);
    EXPECT_THROW(parse("gamma2_rel = 0.9\n"), ConfigError);
    EXPECT_THROW(load_config(tmp("missing.cfg")), IoError);
}
