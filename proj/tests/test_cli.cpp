#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "freeforce/cli.hpp"

using namespace freeforce;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class CliFiles : public ::testing::Test {
protected:
    void SetUp() override {
        dir = std::filesystem::temp_directory_path() /
              ("freeforce_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        std::filesystem::remove_all(dir);
        std::filesystem::create_directories(dir);
    }
    void TearDown() override { std::filesystem::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
    std::filesystem::path dir;
};

} // namespace

TEST(Cli, WrenchAtZeroPressure) {
    const auto r = run({"wrench", "--config", "reference_rig", "--state", "0,0", "--pressures", "0,0,0"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "Fz=0 Mz=0\n");
}

TEST(Cli, WrenchMatchesLibrary) {
    const auto r = run({"wrench", "--config", "reference_rig", "--state=-0.005,0.2", "--pressures", "103400,0,50000"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto a = build_assembly(load_config("reference_rig"));
    const auto w = project_wrench(net_wrench(a, {-0.005, 0.2}, Eigen::Vector3d(103400, 0, 50000)), a.dofs());
    EXPECT_EQ(r.out, "Fz=" + text::sig6(w(0)) + " Mz=" + text::sig6(w(1)) + "\n");
}

TEST(Cli, DescribeAndJacobian) {
    const auto d = run({"describe", "--config", "reference_rig"});
    EXPECT_EQ(d.code, 0);
    EXPECT_NE(d.out.find("FREEs: 3"), std::string::npos);
    EXPECT_NE(d.out.find("free_m85"), std::string::npos);
    const auto j = run({"jacobian", "--config", "reference_rig", "--state", "0,0"});
    EXPECT_EQ(j.code, 0);
    EXPECT_NE(j.out.find("free_p48 Fx=0"), std::string::npos) << j.out;
}

TEST_F(CliFiles, ZonotopeCsvHasSixVertices) {
    const auto r = run({"zonotope", "--config", "reference_rig", "--state", "0,0", "--out", path("z.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("vertices=6"), std::string::npos);
    EXPECT_NE(r.out.find("full_authority=true"), std::string::npos);

    std::istringstream csv(read_text_file(path("z.csv")));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "kind,index,Fz_N,Mz_Nm");
    std::vector<Eigen::Vector2d> verts;
    while (std::getline(csv, line)) {
        if (!line.starts_with("vertex,")) continue;
        const auto c1 = line.find(',', 7);
        const auto c2 = line.find(',', c1 + 1);
        verts.emplace_back(*text::parse_double(line.substr(c1 + 1, c2 - c1 - 1)), *text::parse_double(line.substr(c2 + 1)));
    }
    ASSERT_EQ(verts.size(), 6u);
    auto near = [&](double fz, double mz) {
        return std::any_of(verts.begin(), verts.end(), [&](const Eigen::Vector2d& v) {
            return std::abs(v(0) - fz) < 1e-3 && std::abs(v(1) - mz) < 1e-5;
        });
    };
    EXPECT_TRUE(near(-10.0937, 0.0));
    EXPECT_TRUE(near(7.99670, -0.00710497));
}

TEST_F(CliFiles, ZonotopeSvgAndBadExtension) {
    EXPECT_EQ(run({"zonotope", "--config", "reference_rig", "--state", "0,0", "--out", path("z.svg")}).code, 0);
    EXPECT_NE(read_text_file(path("z.svg")).find("<polygon"), std::string::npos);
    const auto bad = run({"zonotope", "--config", "reference_rig", "--state", "0,0", "--out", path("z.png")});
    EXPECT_EQ(bad.code, 2);
    EXPECT_NE(bad.err.find("UsageError"), std::string::npos);
    const auto k3 = run({"zonotope", "--config", "reference_rig", "--state", "0,0", "--dofs", "Fx,Fz,Mz", "--out", path("z3.svg")});
    EXPECT_EQ(k3.code, 2);
    EXPECT_NE(k3.err.find("WrongDimension"), std::string::npos);
    EXPECT_EQ(run({"zonotope", "--config", "reference_rig", "--state", "0,0", "--dofs", "Fx,Fz,Mz", "--out", path("z3.csv")}).code, 0);
}

TEST(Cli, SolveInfeasibleTargetExitsZero) {
    const auto r = run({"solve", "--config", "reference_rig", "--state", "0,0", "--target", "20,0"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.starts_with("feasible=false residual="));
    const auto ok = run({"solve", "--config", "reference_rig", "--state", "0,0", "--target", "2,0"});
    EXPECT_EQ(ok.code, 0);
    EXPECT_TRUE(ok.out.starts_with("feasible=true"));
    EXPECT_NE(ok.out.find("achieved Fz=2 Mz="), std::string::npos) << ok.out;
}

TEST_F(CliFiles, SweepReportsCollapse) {
    const auto r = run({"sweep", "--config", "reference_rig", "--grid", "dl=-0.02:0.005:26", "--out", path("s.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("states=26"), std::string::npos);
    EXPECT_NE(r.out.find("contraction lost at dl=-0.0137164"), std::string::npos) << r.out;
    const auto csv = read_text_file(path("s.csv"));
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 27);
}

TEST_F(CliFiles, OutputsAreByteIdenticalAcrossRuns) {
    for (int i = 0; i < 2; ++i) {
        const auto n = std::to_string(i);
        ASSERT_EQ(run({"zonotope", "--config", "reference_rig", "--state", "0.003,0.1", "--out", path("z" + n + ".csv")}).code, 0);
        ASSERT_EQ(run({"zonotope", "--config", "reference_rig", "--state", "0.003,0.1", "--out", path("z" + n + ".svg")}).code, 0);
        ASSERT_EQ(run({"sweep", "--config", "reference_rig", "--grid", "dl=-0.01:0.01:5,dphi=0:0.3:3", "--threads",
                       std::to_string(1 + 3 * i), "--out", path("s" + n + ".csv")})
                      .code,
                  0);
    }
    for (const char* f : {"z", "s"}) {
        EXPECT_EQ(read_text_file(path(std::string(f) + "0.csv")), read_text_file(path(std::string(f) + "1.csv")));
    }
    EXPECT_EQ(read_text_file(path("z0.svg")), read_text_file(path("z1.svg")));
}

TEST_F(CliFiles, AnalyzeModelGeneratedData) {
    const auto a = build_assembly(load_config("reference_rig"));
    std::vector<MeasurementRecord> recs;
    const PlatformState x{0.004, 0.1};
    for (const auto& p : pressure_grid(a, {0, 0.5, 1})) {
        recs.push_back({x, p, project_wrench(net_wrench(a, x, p), a.dofs()) + Eigen::Vector2d(0.4, 0.001)});
    }
    write_text_file(path("m.csv"), write_measurements(recs, a));
    const auto r = run({"analyze", "--config", "reference_rig", "--data", path("m.csv"), "--out", path("e.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("N=27"), std::string::npos) << r.out;
    const auto rep = read_text_file(path("e.csv"));
    EXPECT_NE(rep.find("\nall,,,27,"), std::string::npos);
}

TEST_F(CliFiles, ExitCodes) {
    const auto missing = run({"describe", "--config", path("nope.json")});
    EXPECT_EQ(missing.code, 3);
    EXPECT_NE(missing.err.find("IoError"), std::string::npos);

    write_text_file(path("bad.json"), "{\"frees\": [}");
    const auto parse = run({"describe", "--config", path("bad.json")});
    EXPECT_EQ(parse.code, 2);
    EXPECT_NE(parse.err.find("ParseError"), std::string::npos);

    std::string cfg(reference_rig_config_text);
    cfg.replace(cfg.find("\"fiber_angle_deg\": 48"), 21, "\"fiber_angle_deg\": 0");
    write_text_file(path("zero.json"), cfg);
    const auto invalid = run({"describe", "--config", path("zero.json")});
    EXPECT_EQ(invalid.code, 2);
    EXPECT_NE(invalid.err.find("ValidationError(InvalidDesign)"), std::string::npos) << invalid.err;

    const auto limit = run({"wrench", "--config", "reference_rig", "--state", "0,0", "--pressures", "200000,0,0"});
    EXPECT_EQ(limit.code, 2);
    EXPECT_NE(limit.err.find("PressureLimit"), std::string::npos);

    const auto count = run({"wrench", "--config", "reference_rig", "--state", "0,0", "--pressures", "0,0"});
    EXPECT_EQ(count.code, 2);

    const auto over = run({"solve", "--config", "reference_rig", "--state", "0.06,0", "--target", "0,0"});
    EXPECT_EQ(over.code, 2);
    EXPECT_NE(over.err.find("KinematicsInvalid"), std::string::npos) << over.err;

    const auto write = run({"zonotope", "--config", "reference_rig", "--state", "0,0", "--out", path("no/dir/z.csv")});
    EXPECT_EQ(write.code, 3);

    EXPECT_EQ(run({"describe", "--config", "reference_rig", "--bogus"}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"solve", "--config", "reference_rig", "--state", "0,0"}).code, 2);
    EXPECT_EQ(run({"sweep", "--config", "reference_rig", "--grid", "dl=0:1", "--out", path("s.csv")}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}
