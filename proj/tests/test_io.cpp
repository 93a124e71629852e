#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>

#include <doctest.h>

#include "neckflex/config.hpp"
#include "neckflex/csv.hpp"
#include "neckflex/errors.hpp"
#include "neckflex/signal.hpp"

using namespace neckflex;

namespace {

std::filesystem::path tmp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("CSV tables round-trip verbatim") {
  CsvTable table;
  table.header = {"a", "b", "c"};
  table.rows = {{"1", "x y", ""}, {"-2.5", "", "zz"}};
  const auto path = tmp_file("neckflex_io_roundtrip.csv");
  write_csv(path, table);
  const auto back = read_csv(path);
  CHECK(back.header == table.header);
  CHECK(back.rows == table.rows);
  CHECK(back.column("b") == 1);
  CHECK(back.has_column("c"));
  CHECK_FALSE(back.has_column("d"));
  std::filesystem::remove(path);
}

TEST_CASE("carriage returns and blank lines are tolerated") {
  const auto path = tmp_file("neckflex_io_crlf.csv");
  write_text(path, "a,b\r\n1,2\r\n\r\n3,4\r\n");
  const auto table = read_csv(path);
  CHECK(table.header == std::vector<std::string>{"a", "b"});
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[1] == std::vector<std::string>{"3", "4"});
  std::filesystem::remove(path);
}

TEST_CASE("ragged rows name the offending line") {
  const auto path = tmp_file("neckflex_io_ragged.csv");
  write_text(path, "a,b\n1,2\n3\n");
  try {
    read_csv(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::filesystem::remove(path);

  CHECK_THROWS_AS(read_csv(tmp_file("neckflex_io_missing.csv")), ParseError);
}

TEST_CASE("a missing column is named in the error") {
  CsvTable table;
  table.header = {"a"};
  try {
    (void)table.column("theta");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("theta") != std::string::npos);
  }
}

TEST_CASE("numeric fields parse strictly") {
  CHECK(parse_double("2.5", 1) == 2.5);
  CHECK(parse_double("-1e-3", 1) == -1e-3);
  CHECK(std::isinf(parse_double("inf", 1)));
  CHECK(parse_double("-inf", 1) == -std::numeric_limits<double>::infinity());
  CHECK(std::isnan(parse_double("nan", 1)));
  CHECK_THROWS_AS(parse_double("", 1), ParseError);
  CHECK_THROWS_AS(parse_double("1.5x", 1), ParseError);
  CHECK_THROWS_AS(parse_double(" 1", 1), ParseError);

  CHECK(parse_long("42", 1) == 42);
  CHECK(parse_long("-7", 1) == -7);
  CHECK_THROWS_AS(parse_long("3.5", 1), ParseError);
  CHECK_THROWS_AS(parse_long("", 1), ParseError);
}

TEST_CASE("formatted doubles read back bit-exact") {
  const double values[] = {0.0,
                           0.1,
                           -1.0 / 3.0,
                           std::numbers::pi,
                           1e-300,
                           -2.5e300,
                           6.02214076e23,
                           0.2261394478};
  for (double v : values) {
    const auto s = format_double(v);
    CHECK(parse_double(s, 1) == v);
  }
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(std::isnan(parse_double(format_double(NAN), 1)));
}

TEST_CASE("signal traces survive the CSV layout") {
  SignalTrace trace;
  trace.sample_rate = 250.0;
  trace.names = {"u", "v"};
  trace.channels = {{0.0, 0.5, -0.25, 1.0 / 3.0}, {1.0, 2.0, 3.0, 4.0}};
  const auto path = tmp_file("neckflex_io_trace.csv");
  write_trace_csv(path, trace);
  const auto back = read_trace_csv(path);
  CHECK(back.sample_rate == doctest::Approx(250.0).epsilon(1e-9));
  REQUIRE(back.names == trace.names);
  REQUIRE(back.channels.size() == 2);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(back.channels[c][i] == trace.channels[c][i]);
    }
  }
  std::filesystem::remove(path);
}

TEST_CASE("nonuniform time columns are rejected") {
  const auto path = tmp_file("neckflex_io_nonuniform.csv");
  write_text(path, "time_s,u\n0,1\n0.01,2\n0.025,3\n0.03,4\n");
  CHECK_THROWS_AS(read_trace_csv(path), ParseError);
  write_text(path, "time_s,u\n0,1\n0.01,bad\n");
  CHECK_THROWS_AS(read_trace_csv(path), ParseError);
  write_text(path, "time_s,u\n0,1\n0.01,inf\n");
  CHECK_THROWS_AS(read_trace_csv(path), ParseError);
  write_text(path, "time_s\n0\n0.01\n");
  CHECK_THROWS_AS(read_trace_csv(path), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("an absent config file is an error, an empty object is defaults") {
  CHECK_THROWS_AS(load_config(tmp_file("neckflex_io_no_such_config.json")),
                  ParseError);

  const auto path = tmp_file("neckflex_io_cfg.json");
  write_text(path, "{}\n");
  const auto cfg = load_config(path);
  CHECK(cfg.bar_array.bar_diameter == 1.5e-3);
  CHECK(cfg.bar_array.bar_count == 7);
  CHECK(std::isinf(cfg.bar_array.gap));
  CHECK(cfg.statics.head_weight == 50.0);
  CHECK(cfg.envelope.sample_rate == 2000.0);
  CHECK(cfg.segmentation.hold_band_deg == 5.0);
  std::filesystem::remove(path);
}

TEST_CASE("config overrides apply and unknown keys fail loudly") {
  const auto path = tmp_file("neckflex_io_cfg2.json");
  write_text(path, R"({
    "bar_array": {"gap_m": 0.0013, "bar_count": 5},
    "statics": {"head_weight_n": 45.0, "com_lever_m": [0.01, 0.12]},
    "envelope": {"sample_rate_hz": 1000.0},
    "segmentation": {"hold_min_s": 2.0}
  })");
  const auto cfg = load_config(path);
  CHECK(cfg.bar_array.gap == 0.0013);
  CHECK(cfg.bar_array.bar_count == 5);
  CHECK(cfg.statics.head_weight == 45.0);
  CHECK(cfg.statics.com_lever.x == 0.01);
  CHECK(cfg.statics.com_lever.z == 0.12);
  CHECK(cfg.envelope.sample_rate == 1000.0);
  CHECK(cfg.segmentation.hold_min == 2.0);

  write_text(path, R"({"bar_array": {"diameter": 1.0}})");
  CHECK_THROWS_AS(load_config(path), ParseError);
  write_text(path, R"({"typo_section": {}})");
  CHECK_THROWS_AS(load_config(path), ParseError);
  write_text(path, "{ not json");
  CHECK_THROWS_AS(load_config(path), ParseError);
  write_text(path, R"({"bar_array": {"gap_m": "sometimes"}})");
  CHECK_THROWS_AS(load_config(path), ParseError);
  write_text(path, R"({"bar_array": {"bar_count": 2.5}})");
  CHECK_THROWS_AS(load_config(path), ParseError);
  // Values that parse but fail validation are still config errors.
  write_text(path, R"({"bar_array": {"bar_diameter_m": -1.0}})");
  CHECK_THROWS_AS(load_config(path), ParseError);
  write_text(path, R"({"envelope": {"sample_rate_hz": 500.0}})");
  CHECK_THROWS_AS(load_config(path), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("configs round-trip through save and load") {
  ToolkitConfig cfg;
  cfg.bar_array.gap = 0.0017;
  cfg.bar_array.youngs_modulus = 128e9;
  cfg.statics.base_lever = {-0.04, -0.02};
  cfg.envelope.window = 0.2;
  cfg.segmentation.max_unmatched = 0.25;

  const auto path = tmp_file("neckflex_io_cfg3.json");
  save_config(path, cfg);
  const auto back = load_config(path);
  CHECK(back.bar_array.gap == cfg.bar_array.gap);
  CHECK(back.bar_array.youngs_modulus == cfg.bar_array.youngs_modulus);
  CHECK(back.statics.base_lever.x == cfg.statics.base_lever.x);
  CHECK(back.envelope.window == cfg.envelope.window);
  CHECK(back.segmentation.max_unmatched == cfg.segmentation.max_unmatched);

  // The free-plate gap serializes as a string and comes back infinite.
  cfg.bar_array.gap = std::numeric_limits<double>::infinity();
  save_config(path, cfg);
  CHECK(std::isinf(load_config(path).bar_array.gap));
  std::filesystem::remove(path);
}

}  // TEST_SUITE
