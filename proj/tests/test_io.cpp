#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "mac/errors.hpp"
#include "mac/experiments.hpp"
#include "mac/io.hpp"

using namespace mac;
namespace fs = std::filesystem;

namespace {

const char* kExample1Config = R"(grid:
  d: 2
  n: 256
m: 2
epsilon: 0.01
kappa: 5
tau: 0.01
t_end: 50
scheme: etdrk2
initial_condition:
  name: example1
)";

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mac_etd_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string with_line_replaced(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("parse example 1 config") {
  const ParsedConfig p = parse_config(kExample1Config);
  const SimConfig& c = p.config;
  CHECK(c.grid.d == 2);
  CHECK(c.grid.n == 256);
  CHECK(c.m == 2);
  CHECK(c.epsilon == 0.01);
  CHECK(c.kappa == 5.0);
  CHECK(c.tau == 0.01);
  CHECK(c.t_end == 50.0);
  CHECK(c.scheme == Scheme::etdrk2);
  CHECK(c.initial_condition.name == "example1");
  CHECK(c.monitor_stride == 1);
  CHECK(c.snapshot_times == std::vector<double>{0.0, 50.0});
  CHECK(p.notices.empty());
}

TEST_CASE("config validation") {
  SUBCASE("kappa below both thresholds warns twice") {
    const std::string text = R"(grid: {d: 3, n: 8}
m: 3
epsilon: 0.01
kappa: 3
tau: 0.1
t_end: 1
scheme: etd1
initial_condition: {name: example5}
)";
    const ParsedConfig p = parse_config(text);
    REQUIRE(p.notices.size() == 2);
    CHECK(p.notices[0].message.find("3.5") != std::string::npos);
    CHECK(p.notices[1].message.find("8") != std::string::npos);
  }
  SUBCASE("tau = 0 rejected") {
    try {
      parse_config(with_line_replaced(kExample1Config, "tau: 0.01", "tau: 0"));
      FAIL("accepted tau = 0");
    } catch (const ConfigError& e) {
      CHECK(e.field() == "tau");
    }
  }
  SUBCASE("unknown key rejected with its line") {
    try {
      parse_config(std::string(kExample1Config) + "kapa: 5\n");
      FAIL("accepted unknown key");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("kapa") != std::string::npos);
      CHECK(std::string(e.what()).find("line 12") != std::string::npos);
    }
  }
  SUBCASE("missing required key") {
    CHECK_THROWS_AS(parse_config(with_line_replaced(kExample1Config, "epsilon: 0.01\n", "")), ConfigError);
  }
  SUBCASE("syntax error") { CHECK_THROWS_AS(parse_config("grid: [1, 2\nm: 2\n"), ConfigError); }
  SUBCASE("dimension mismatch with initial condition") {
    CHECK_THROWS_AS(parse_config(with_line_replaced(kExample1Config, "name: example1", "name: example5")),
                    ConfigError);
  }
  SUBCASE("snapshot past the end") {
    CHECK_THROWS_AS(parse_config(std::string(kExample1Config) + "snapshot_times: [0, 60]\n"), ConfigError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_config("/nonexistent/run.yaml"), IoError); }
}

TEST_CASE("config round trip") {
  SimConfig c = parse_config(kExample1Config).config;
  c.snapshot_times = {0.0, 0.1, 1.0 / 3.0, 50.0};
  c.monitor_stride = 7;
  c.output_dir = "some/dir";
  CHECK(parse_config(serialize_config(c)).config == c);

  SimConfig c6 = c;
  c6.grid = GridSpec(3, 16);
  c6.m = 3;
  c6.kappa = 8.0;
  c6.initial_condition = {"example6", {{"r", 0.04}}};
  CHECK(parse_config(serialize_config(c6)).config == c6);
}

TEST_CASE("monitor csv") {
  const fs::path dir = scratch_dir("csv");
  MonitorSeries s;
  s.append({0.0, std::sqrt(2.0), 0.123456789012345678});
  s.append({0.1, 1.0 / 3.0, 1e-300});
  s.append({0.2, 1.4142, 2.0 / 7.0});
  write_monitor_csv(s, dir / "m.csv");

  const std::string text = slurp(dir / "m.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  CHECK(text.rfind("t,sup_frob,energy\n", 0) == 0);

  const MonitorSeries back = read_monitor_csv(dir / "m.csv");
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.records()[i].t == s.records()[i].t);
    CHECK(back.records()[i].sup_norm == s.records()[i].sup_norm);
    CHECK(back.records()[i].energy == s.records()[i].energy);
  }
  CHECK_THROWS_AS(write_monitor_csv(s, "/nonexistent/dir/m.csv"), IoError);
}

TEST_CASE("snapshots") {
  const fs::path dir = scratch_dir("snap");

  SUBCASE("field round trip is bit exact") {
    const MatrixField u = init_example1(GridSpec(2, 12));
    write_snapshot(u, 1.25, dir / "f.bin");
    const Snapshot snap = read_snapshot(dir / "f.bin");
    CHECK(snap.header.d == 2);
    CHECK(snap.header.n == 12);
    CHECK(snap.header.m == 2);
    CHECK(snap.header.t == 1.25);
    CHECK(snap.header.payload == PayloadKind::field);
    CHECK(snap.values.size() == snap.header.element_count());
    const MatrixField back = snapshot_to_field(snap);
    REQUIRE(back.raw().size() == u.raw().size());
    CHECK(std::memcmp(back.raw().data(), u.raw().data(), u.raw().size() * sizeof(double)) == 0);
  }

  SUBCASE("3D determinant payload") {
    const GridSpec g(3, 4);
    const auto det = determinant_field(init_example5(g));
    write_determinant_snapshot(g, 3, det, 0.0, dir / "d.bin");
    const Snapshot snap = read_snapshot(dir / "d.bin");
    CHECK(snap.header.payload == PayloadKind::determinant);
    CHECK(snap.header.element_count() == 64);
    CHECK(snap.values == det);
  }

  SUBCASE("truncated payload rejected") {
    write_snapshot(init_example1(GridSpec(2, 4)), 0.0, dir / "f.bin");
    const std::string bytes = slurp(dir / "f.bin");
    std::ofstream(dir / "cut.bin", std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 8));
    CHECK_THROWS_AS(read_snapshot(dir / "cut.bin"), IoError);
    std::ofstream(dir / "long.bin", std::ios::binary) << bytes << "12345678";
    CHECK_THROWS_AS(read_snapshot(dir / "long.bin"), IoError);
  }

  SUBCASE("missing file") { CHECK_THROWS_AS(read_snapshot(dir / "nope.bin"), IoError); }
}

TEST_CASE("determinant images") {
  CHECK(determinant_gray_level(-1.05) == 0);
  CHECK(determinant_gray_level(1.05) == 65535);
  CHECK(determinant_gray_level(-7.0) == 0);
  CHECK(determinant_gray_level(7.0) == 65535);
  const std::uint16_t plus_one = determinant_gray_level(1.0);
  CHECK(plus_one == static_cast<std::uint16_t>(std::lround(2.05 / 2.1 * 65535.0)));

  const fs::path dir = scratch_dir("pgm");
  const GridSpec g(2, 6);
  const std::vector<double> det(g.cell_count(), 1.0);
  write_determinant_pgm(g, det, dir / "d.pgm");
  const std::string bytes = slurp(dir / "d.pgm");
  const std::string header = "P5\n6 6\n65535\n";
  REQUIRE(bytes.size() == header.size() + 72);
  CHECK(bytes.substr(0, header.size()) == header);
  for (std::size_t i = header.size(); i < bytes.size(); i += 2) {
    const auto hi = static_cast<unsigned char>(bytes[i]), lo = static_cast<unsigned char>(bytes[i + 1]);
    CHECK(((hi << 8) | lo) == plus_one);
  }
}

TEST_CASE("run_config writes outputs") {
  const fs::path dir = scratch_dir("run");
  SimConfig c = parse_config(kExample1Config).config;
  c.grid = GridSpec(2, 16);
  c.epsilon = 0.05;
  c.tau = 0.1;
  c.t_end = 0.5;
  c.snapshot_times = {0.0, 0.5};
  c.output_dir = dir;
  const RunOutcome out = run_config(c);
  CHECK(out.mbp.passed);
  CHECK(out.energy.passed);
  CHECK(out.series.size() == 6);
  CHECK(fs::exists(dir / "monitor.csv"));
  CHECK(fs::exists(dir / "config.yaml"));
  CHECK(fs::exists(dir / ("field_" + time_tag(0.5) + ".bin")));
  CHECK(fs::exists(dir / ("det_" + time_tag(0.0) + ".pgm")));
  CHECK(read_monitor_csv(dir / "monitor.csv").size() == 6);
  CHECK(load_config(dir / "config.yaml").config == c);
}
