#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "orient/cli.hpp"
#include "orient/error.hpp"
#include "orient/grid_io.hpp"
#include "orient/verify.hpp"

using namespace orient;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("rotorwig_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

    static std::string read(const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    int run(std::vector<std::string> args) {
        args.insert(args.begin(), "rotorwig");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        out_.str("");
        err_.str("");
        return run_cli(static_cast<int>(argv.size()), argv.data(), out_, err_);
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

constexpr int code(ExitCode c) { return static_cast<int>(c); }

}  // namespace

TEST(CliParsers, AnglesGridsWindows) {
    EXPECT_DOUBLE_EQ(parse_angle("pi"), kPi);
    EXPECT_DOUBLE_EQ(parse_angle("-pi"), -kPi);
    EXPECT_DOUBLE_EQ(parse_angle("2pi"), 2 * kPi);
    EXPECT_DOUBLE_EQ(parse_angle("pi/2"), kPi / 2);
    EXPECT_DOUBLE_EQ(parse_angle("3pi/4"), 0.75 * kPi);
    EXPECT_DOUBLE_EQ(parse_angle("1.25"), 1.25);
    EXPECT_THROW(parse_angle("pie"), ConfigError);
    EXPECT_THROW(parse_angle(""), ConfigError);

    const AngleGrid g = parse_grid("16x8x4");
    EXPECT_EQ(g.n_alpha, 16);
    EXPECT_EQ(g.n_beta, 8);
    EXPECT_EQ(g.n_gamma, 4);
    EXPECT_THROW(parse_grid("16x8"), ConfigError);
    EXPECT_THROW(parse_grid("0x1x1"), ConfigError);

    EXPECT_EQ(parse_window("1,2,3"), (std::array<int, 3>{1, 2, 3}));
    EXPECT_THROW(parse_window("1,-2,3"), ConfigError);
    EXPECT_THROW(parse_window("1,2"), ConfigError);
}

TEST(CliParsers, AlignConfig) {
    const AlignRun fig3 = align_preset("fig3");
    EXPECT_EQ(fig3.snapshot_times.size(), 5u);
    EXPECT_TRUE(fig3.initial_grid);
    EXPECT_NEAR(fig3.config.pulse.area(), -10.0, 1e-12);
    EXPECT_THROW(align_preset("fig4"), ConfigError);

    const AlignRun r = parse_align_config(R"({"times": {"start": 0, "stop": 1, "count": 5}, "j_max": 20})", "fig3");
    EXPECT_EQ(r.config.times.size(), 5u);
    EXPECT_EQ(r.config.j_max, 20);
    EXPECT_EQ(r.snapshot_times.size(), 5u);
    EXPECT_THROW(parse_align_config(R"({"times": [1, 0.5]})", ""), ParseError);
    EXPECT_THROW(parse_align_config(R"({"times": [1], "colour": 2})", ""), ParseError);
    EXPECT_THROW(parse_align_config(R"({"times": [1], "initial": [2, 3, 0]})", ""), ParseError);
}

TEST_F(CliTest, MomentumEigenstateGridIsExact) {
    write("eig.json", R"({"basis": "m", "m_max": [1, 1, 1], "coefficients": [[[1, 0, -1], 1, 0]]})");
    ASSERT_EQ(run({"wigner", "--state", path("eig.json"), "--grid", "4x4x4", "--out", path("o")}), 0) << err_.str();
    const PhaseSpaceGrid W = read_grid(path("o/wigner"));
    const double level = 1 / (4 * kPi * kPi * kPi);
    for (std::size_t m = 0; m < W.n_momenta(); ++m) {
        const bool on = W.spec().momenta.at(m) == MomentumTriple{1, 0, -1};
        for (std::size_t a = 0; a < W.n_angles(); ++a) EXPECT_NEAR(W.at(a, m), on ? level : 0.0, 1e-17);
    }
    EXPECT_TRUE(fs::exists(path("o/wigner_report.json")));
}

TEST_F(CliTest, WideCoherentStatePeaksAtTen) {
    ASSERT_EQ(run({"coherent", "--out", path("o"), "--name", "wide"}), 0) << err_.str();
    const std::string report = read(path("o/wide_report.json"));
    EXPECT_NE(report.find("\"m_alpha\": 10"), std::string::npos) << report;
    ASSERT_EQ(run({"wigner", "--state", path("o/wide_state.json"), "--grid", "64x1x1", "--out", path("w")}), 0)
        << err_.str();
    EXPECT_NE(read(path("w/wigner_report.json")).find("\"m_alpha\": 10"), std::string::npos);
}

TEST_F(CliTest, CorruptedStateIsParseErrorWithoutOutput) {
    write("bad.json", R"({"basis": "m", "m_max": [1, 0, 0], "coefficients": [[[0, 0, 0], "x", 0]]})");
    EXPECT_EQ(run({"wigner", "--state", path("bad.json"), "--out", path("o")}), code(ExitCode::parse));
    EXPECT_NE(err_.str().find("coefficients/0/1"), std::string::npos) << err_.str();
    EXPECT_FALSE(fs::exists(path("o")));

    write("extra.json", R"({"basis": "m", "m_max": [1, 0, 0], "coefficients": [[[0, 0, 0], 1, 0]], "spin": 1})");
    EXPECT_EQ(run({"wigner", "--state", path("extra.json"), "--out", path("o")}), code(ExitCode::parse));
    EXPECT_FALSE(fs::exists(path("o")));
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(run({"wigner", "--state", path("missing.json")}), code(ExitCode::io));
    EXPECT_EQ(run({"frobnicate"}), code(ExitCode::usage));
    write("eig.json", R"({"basis": "m", "m_max": [1, 0, 0], "coefficients": [[[0, 0, 0], 1, 0]]})");
    EXPECT_EQ(run({"wigner", "--state", path("eig.json"), "--order", "8"}), code(ExitCode::usage));

    write("pole.json", R"({"trajectories": [{"alpha": 0, "beta": 0, "gamma": 0, "p_alpha": 0, "p_beta": 1, "p_gamma": 0}]})");
    EXPECT_EQ(run({"classical", "--init", path("pole.json"), "--out", path("c")}), code(ExitCode::singularity));

    write("tight.json", R"({"pulse": {"kick_area": -40}, "j_max": 6, "times": [0.5]})");
    EXPECT_EQ(run({"align", "--config", path("tight.json"), "--out", path("a")}), code(ExitCode::truncation));
    EXPECT_FALSE(fs::exists(path("a")));
}

TEST_F(CliTest, ToleranceBreachKeepsOutputs) {
    write("eig.json", R"({"basis": "m", "m_max": [2, 0, 0], "coefficients": [[[1, 0, 0], 1, 0], [[-1, 0, 0], 1, 0]],
                          "normalize": true})");
    EXPECT_EQ(run({"wigner", "--state", path("eig.json"), "--grid", "3x1x1", "--mwin", "0,0,0", "--out", path("o")}),
              code(ExitCode::tolerance));
    EXPECT_TRUE(fs::exists(path("o/wigner_report.json")));
    EXPECT_NE(read(path("o/wigner_report.json")).find("\"passed\": false"), std::string::npos);
}

TEST_F(CliTest, PresetWritesSixGridsAndSignal) {
    ASSERT_EQ(run({"align", "--preset", "fig3", "--out", path("o"), "--name", "fig3"}), 0) << err_.str();
    for (const std::string stem : {"initial", "t0", "t1", "t2", "t3", "t4"}) {
        EXPECT_TRUE(fs::exists(path("o/fig3_" + stem + ".json"))) << stem;
        EXPECT_TRUE(fs::exists(path("o/fig3_" + stem + ".tsv"))) << stem;
    }
    std::istringstream signal(read(path("o/fig3_signal.tsv")));
    std::string line;
    int rows = -1;
    while (std::getline(signal, line)) ++rows;
    EXPECT_EQ(rows, 629);
}

TEST_F(CliTest, ZeroStrengthKickGivesConstantSignal) {
    write("run.json", R"({"pulse": {"strength": 0}, "j_max": 10, "times": [0.1, 0.5, 1, 2, 3],
                          "outputs": {"snapshot_times": [1], "grid": "1x16x1", "m_beta_max": 8, "states": true}})");
    ASSERT_EQ(run({"align", "--config", path("run.json"), "--out", path("o")}), 0) << err_.str();
    std::istringstream signal(read(path("o/align_signal.tsv")));
    std::string line;
    std::getline(signal, line);
    EXPECT_EQ(line, "t\tcos2beta");
    std::vector<double> values;
    while (std::getline(signal, line)) values.push_back(std::stod(line.substr(line.find('\t') + 1)));
    ASSERT_EQ(values.size(), 5u);
    for (double v : values) EXPECT_NEAR(v, values.front(), 1e-12);
    EXPECT_TRUE(fs::exists(path("o/align_t0_state.json")));
}

TEST_F(CliTest, UnsortedTimesRejectedAtParse) {
    write("run.json", R"({"times": [0.5, 0.1]})");
    EXPECT_EQ(run({"align", "--config", path("run.json"), "--out", path("o")}), code(ExitCode::parse));
    EXPECT_FALSE(fs::exists(path("o")));
}

TEST_F(CliTest, SuperposeCountsFringes) {
    write("cat.json", R"({"sigma": 1, "m_max": [10, 0, 0], "grid": "256x1x1",
                          "components": [{"center": ["pi", 4], "weight": [1, 0]}, {"center": ["pi", -4], "weight": [1, 0]}]})");
    ASSERT_EQ(run({"superpose", "--spec", path("cat.json"), "--out", path("o")}), 0) << err_.str();
    EXPECT_NE(out_.str().find("fringes 8"), std::string::npos) << out_.str();
}

TEST_F(CliTest, ClassicalTrajectories) {
    write("init.json", R"({"constants": {"A": 0.5, "C": 0.8},
                           "trajectories": [{"alpha": 0, "beta": "pi/3", "gamma": 0, "p_alpha": 1, "p_beta": 0, "p_gamma": 0.5}]})");
    ASSERT_EQ(run({"classical", "--init", path("init.json"), "--tspan", "5", "--out", path("o")}), 0) << err_.str();
    const std::string report = read(path("o/classical_report.json"));
    EXPECT_NE(report.find("max_energy_drift"), std::string::npos);
    EXPECT_TRUE(fs::exists(path("o/classical.tsv")));
}

TEST_F(CliTest, OutputsAreByteReproducible) {
    for (const char* d : {"a", "b"}) {
        ASSERT_EQ(run({"coherent", "--sigma", "2", "--center", "pi/2,3", "--grid", "32x1x1", "--out", path(d), "--plot"}),
                  0);
    }
    int files = 0;
    for (const auto& e : fs::directory_iterator(path("a"))) {
        EXPECT_EQ(read(e.path().string()), read(path("b/" + e.path().filename().string()))) << e.path();
        ++files;
    }
    EXPECT_EQ(files, 5);
}

TEST_F(CliTest, VerifyPassesAndRoundTrips) {
    ASSERT_EQ(run({"verify", "--out", path("o")}), 0) << out_.str();
    const std::string text = read(path("o/verify.json"));
    const VerifyReport r = parse_verify_report(text);
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(serialize_verify_report(r), text);
    EXPECT_NE(out_.str().find("PASS marginal.angle"), std::string::npos) << out_.str();

    ASSERT_EQ(run({"verify", "--quadrature-order", "32", "--out", path("q")}), 0) << out_.str();
    const VerifyReport low = parse_verify_report(read(path("q/verify.json")));
    EXPECT_EQ(low.quadrature_order, 32);
    EXPECT_TRUE(low.passed());

    EXPECT_EQ(run({"verify", "--quadrature-order", "16", "--out", path("z")}), code(ExitCode::usage));
    EXPECT_THROW(parse_verify_report(R"({"format": "orient-verify-1"})"), ParseError);
}
