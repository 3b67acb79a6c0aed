#include "doctest.h"

#include <sstream>

#include "handreq/cli.hpp"
#include "test_util.hpp"

using namespace handreq;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string spec(const std::string& name) { return (testutil::data_dir() / "specs" / name).string(); }

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help and usage errors") {
    const auto help = cli({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("optimize-task") != std::string::npos);
    CHECK(cli({}).code == 1);
    CHECK(cli({"no-such-command"}).code == 1);
    CHECK(cli({"size-motor"}).code == 1);
    CHECK(cli({"bandwidth", "--help"}).code == 0);
  }

  TEST_CASE("missing files name the path") {
    const auto r = cli({"size-motor", "--motor", "/nonexistent/motor.json"});
    CHECK(r.code == 1);
    CHECK(r.err.find("/nonexistent/motor.json") != std::string::npos);
    const auto t = cli({"optimize-task", "--trajectory", "/nonexistent/w.csv"});
    CHECK(t.code == 1);
    CHECK(t.err.find("/nonexistent/w.csv") != std::string::npos);
  }

  TEST_CASE("sizing commands") {
    const auto m = cli({"size-motor", "--motor", spec("ideal_pip_motor.json")});
    CHECK(m.code == 0);
    CHECK(m.out.rfind("motor_torque_Nm,0.1256", 0) == 0);
    const auto g = cli({"gear-strength", "--gear", spec("lewis_gear.json")});
    CHECK(g.code == 0);
    CHECK(g.out.rfind("gear_strength_Nm,0.2723", 0) == 0);
    const auto s = cli({"sea-range", "--motor", spec("sea_example_motor.json"), "--sea", spec("sea_example.json")});
    CHECK(s.code == 0);
    CHECK(std::stod(s.out.substr(s.out.find(',') + 1)) == doctest::Approx(6.4e-3).epsilon(1e-12));
    CHECK(s.out.find("k_max_Nm_per_rad,156.25") != std::string::npos);
    CHECK(s.out.find("natural_frequency_rad_s,10") != std::string::npos);
    CHECK(s.out.find("stiffness within the window") != std::string::npos);
    CHECK(cli({"sea-range", "--motor", spec("sea_example_motor.json")}).code == 1);
  }

  TEST_CASE("bandwidth command") {
    const testutil::TempDir dir("cli-bw");
    std::string csv = "t,torque\n";
    for (int k = 0; k < 20000; ++k) csv += std::to_string(k * 0.01) + ",0.5\n";
    write(dir / "c.csv", csv);
    const auto r = cli({"bandwidth", "--trajectory", (dir / "c.csv").string(), "--curve", (dir / "curve.csv").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("\n0.6,") != std::string::npos);
    CHECK(fs::exists(dir / "curve.csv"));
    write(dir / "bad.csv", "t,torque\n0,1\n0.01,x\n");
    const auto bad = cli({"bandwidth", "--trajectory", (dir / "bad.csv").string()});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("torque") != std::string::npos);
  }

  TEST_CASE("optimize-task on a zero trajectory") {
    const testutil::TempDir dir("cli-opt");
    write(dir / "zero.csv", "t,Fx,Fy,Fz,Tx,Ty,Tz\n0,0,0,0,0,0,0\n0.01,0,0,0,0,0,0\n0.02,0,0,0,0,0,0\n");
    const std::vector<std::string> base{"optimize-task", "--trajectory", (dir / "zero.csv").string(), "--grasp",
                                        "Tripod1", "--handle-size", "small", "--palm", "--bandwidth"};
    auto a = base;
    a.insert(a.end(), {"--output", (dir / "a").string()});
    auto b = base;
    b.insert(b.end(), {"--output", (dir / "b").string()});
    const auto ra = cli(a);
    const auto rb = cli(b);
    CHECK(ra.code == 0);
    CHECK(ra.out == rb.out);
    CHECK(testutil::read_tree(dir / "a") == testutil::read_tree(dir / "b"));
    CHECK(fs::exists(dir / "a" / "peaks.csv"));
    CHECK(cli({"optimize-task", "--trajectory", (dir / "zero.csv").string(), "--grasp", "X-Pinch"}).code == 1);
  }

  TEST_CASE("report command") {
    const testutil::TempDir dir("cli-report");
    write(dir / "suite.csv",
          "task,joint,peak_torque_Nm,bandwidth_Hz,handle_size,palm,infeasible_steps\n"
          "a,MCP-Z,0.1,2,small,1,0\na,MCP-X,0.3,4,small,1,0\na,PIP,0.2,3,small,1,0\n");
    const auto achieved = (testutil::data_dir() / "profiles" / "table1_achieved.json").string();
    const auto r = cli({"report", "--results", dir.path().string(), "--achieved", achieved, "--output",
                        dir.path().string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("Width (knuckle)") != std::string::npos);
    CHECK(fs::exists(dir / "report.csv"));
    CHECK(cli({"report", "--results", "/nonexistent", "--achieved", achieved}).code == 1);
  }
}
