#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "asso/bench.hpp"
#include "asso/io.hpp"
#include "asso_cli/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "asso");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = asso::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("asso_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    fs::path dir;
};

} // namespace

TEST_F(CliTest, SynthWritesSignalAndTruth) {
    const auto sig = dir / "x.csv";
    const auto r = run({"synth", "three_component", "-o", sig.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = asso::read_csv(sig);
    EXPECT_EQ(t.rows(), 512u);
    const auto truth = asso::read_csv(dir / "x_truth.csv");
    EXPECT_EQ(truth.header,
              (std::vector<std::string>{"time", "s1", "s2", "s3", "if1", "if2", "if3"}));
    EXPECT_EQ(asso::read_signal_csv(sig).sample_rate, 25.6);
}

TEST_F(CliTest, SynthNoiseIsSeeded) {
    const auto a = dir / "a.csv";
    const auto b = dir / "b.csv";
    const auto c = dir / "c.csv";
    ASSERT_EQ(run({"--seed", "5", "synth", "lfm", "--snr", "10", "-o", a.string()}).code, 0);
    ASSERT_EQ(run({"--seed", "5", "synth", "lfm", "--snr", "10", "-o", b.string()}).code, 0);
    ASSERT_EQ(run({"--seed", "6", "synth", "lfm", "--snr", "10", "-o", c.string()}).code, 0);
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_NE(slurp(a), slurp(c));
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(run({"synth", "nonsense", "-o", (dir / "x.csv").string()}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"stft", (dir / "x.csv").string(), "-o", (dir / "tf.csv").string()}).code, 2);
    EXPECT_EQ(run({"bench", "-o", dir.string(), "--snr", ""}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, MissingInputIsIoError) {
    const auto r = run({"separate", (dir / "nope.csv").string(), "-o", (dir / "out").string()});
    EXPECT_EQ(r.code, 3);
    EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, MalformedConfigIsConfigError) {
    const auto sig = dir / "x.csv";
    ASSERT_EQ(run({"synth", "lfm", "-o", sig.string()}).code, 0);
    {
        std::ofstream cfg(dir / "bad.cfg");
        cfg << "sigma_min = 0.1\nnot_a_key = 3\n";
    }
    EXPECT_EQ(run({"separate", sig.string(), "-o", (dir / "out").string(), "--config", (dir / "bad.cfg").string()})
                  .code,
              4);
}

TEST_F(CliTest, StftToneRidge) {
    asso::SampledSignal x;
    x.sample_rate = 64;
    for (int n = 0; n < 256; ++n) {
        x.samples.push_back(std::cos(2 * M_PI * 8 * n / 64.0));
    }
    const auto sig = dir / "tone.csv";
    {
        std::ofstream out(sig);
        asso::write_signal_csv(out, x);
    }
    const auto tf = dir / "tf.csv";
    const auto r = run({"stft", sig.string(), "--sigma", "0.25", "-o", tf.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = asso::read_csv(tf);
    const auto& time = t.column("time");
    const auto& freq = t.column("freq");
    const auto& mag = t.column("abs");
    // Middle frame peaks at 8 Hz with magnitude A/2.
    double best = -1;
    double best_f = -1;
    for (std::size_t i = 0; i < t.rows(); ++i) {
        if (time[i] == 2.0 && mag[i] > best) {
            best = mag[i];
            best_f = freq[i];
        }
    }
    EXPECT_EQ(best_f, 8.0);
    EXPECT_NEAR(best, 0.5, 1e-6);
    EXPECT_TRUE(fs::exists(dir / "tf_sigma.csv"));
    EXPECT_EQ(run({"stft", sig.string(), "--sigma", "-1", "-o", tf.string()}).code, 2);
}

TEST_F(CliTest, SeparateWithTruthMatchesLibrary) {
    const auto sig = dir / "x.csv";
    ASSERT_EQ(run({"synth", "three_component", "-o", sig.string()}).code, 0);
    const auto c = asso::gen_three_component();
    {
        std::ofstream cfg(dir / "rec.cfg");
        cfg << asso::serialize_config(asso::recommended_config(c));
    }
    const auto out = dir / "out";
    const auto r = run({"separate", sig.string(), "-o", out.string(), "--config", (dir / "rec.cfg").string(), "--truth",
                        (dir / "x_truth.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* f : {"trend.csv", "residual.csv", "component_1.csv", "component_3.csv", "sigma_1.csv",
                          "ridges.csv", "metrics.csv", "manifest.json"}) {
        EXPECT_TRUE(fs::exists(out / f)) << f;
    }
    const auto metrics = asso::read_csv(out / "metrics.csv");
    ASSERT_EQ(metrics.rows(), 3u);

    const auto res = asso::separate(c.signal, asso::recommended_config(c));
    const auto aligned = asso::aligned_components(res, c);
    std::vector<double> time(512);
    for (std::size_t n = 0; n < 512; ++n) {
        time[n] = c.signal.time_at(n);
    }
    for (std::size_t k = 0; k < 3; ++k) {
        const double expect = asso::mse({aligned[k]}, {c.truth_samples(k)}, time, time.front(), time.back());
        EXPECT_NEAR(metrics.column("relative_l2")[k], expect, 1e-12);
    }
    const auto manifest = slurp(out / "manifest.json");
    EXPECT_NE(manifest.find("\"component_count\": 3"), std::string::npos);
}

TEST_F(CliTest, SeparateZeroSignal) {
    const auto sig = dir / "z.csv";
    {
        std::ofstream out(sig);
        out << "time,value\n";
        for (int n = 0; n < 128; ++n) {
            out << n / 32.0 << ",0\n";
        }
    }
    const auto out = dir / "out";
    const auto r = run({"separate", sig.string(), "-o", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(out / "trend.csv"));
    EXPECT_TRUE(fs::exists(out / "residual.csv"));
    EXPECT_FALSE(fs::exists(out / "component_1.csv"));
}
