#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "masf/config.hpp"
#include "masf/io.hpp"
#include "test_util.hpp"

namespace masf {
namespace {

namespace fs = std::filesystem;
using testing::random_field;

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("masf_io_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(FieldFile, ByteLayout) {
  const Field f(Shape{1, 2, 1}, std::vector<double>{1.0, -2.5});
  std::ostringstream os;
  io::write_field(os, f);
  const std::string b = os.str();
  ASSERT_EQ(b.size(), 4u + 16u + 16u);
  EXPECT_EQ(b.substr(0, 4), "MASF");
  const unsigned char header[16] = {1, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0};
  EXPECT_EQ(std::memcmp(b.data() + 4, header, 16), 0);
  // 1.0 = 0x3FF0000000000000, -2.5 = 0xC004000000000000, little-endian
  const unsigned char data[16] = {0, 0, 0, 0, 0, 0, 0xF0, 0x3F, 0, 0, 0, 0, 0, 0, 0x04, 0xC0};
  EXPECT_EQ(std::memcmp(b.data() + 20, data, 16), 0);
}

TEST(FieldFile, RoundTripIsBitExact) {
  std::mt19937_64 rng(90);
  const fs::path dir = temp_dir("rt");
  const Field f = random_field({5, 3, 2}, rng, -1e3, 1e3);
  io::save_field(dir / "a.field", f);
  EXPECT_TRUE(bitwise_equal(io::load_field(dir / "a.field"), f));

  const std::vector<Field> set = {random_field({2, 2, 1}, rng), random_field({2, 2, 1}, rng),
                                  random_field({2, 2, 1}, rng)};
  io::save_fields(dir / "set.field", set);
  const std::vector<Field> back = io::load_fields(dir / "set.field");
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(bitwise_equal(back[i], set[i]));
  EXPECT_THROW(io::load_field(dir / "set.field"), FormatError);
  fs::remove_all(dir);
}

TEST(FieldFile, Malformed) {
  std::optional<Field> f;
  std::istringstream bad_magic(std::string("NOPE") + std::string(16, '\0'));
  EXPECT_THROW(io::read_field(bad_magic, f), FormatError);

  std::ostringstream os;
  io::write_field(os, Field(Shape{2, 2, 1}, 0.5));
  std::istringstream truncated(os.str().substr(0, os.str().size() - 3));
  EXPECT_THROW(io::read_field(truncated, f), FormatError);

  std::string v2 = os.str();
  v2[4] = 2;
  std::istringstream wrong_version(v2);
  EXPECT_THROW(io::read_field(wrong_version, f), FormatError);

  std::istringstream empty("");
  EXPECT_FALSE(io::read_field(empty, f));
}

TEST(Preview, PgmAndPpm) {
  const fs::path dir = temp_dir("preview");
  const Field g(Shape{1, 3, 1}, std::vector<double>{-1.0, 0.0, 5.0});
  const fs::path pg = io::save_preview(dir / "g", g);
  EXPECT_EQ(pg.extension(), ".pgm");
  std::ifstream is(pg, std::ios::binary);
  const std::string content((std::istreambuf_iterator<char>(is)), {});
  EXPECT_EQ(content, std::string("P5\n3 1\n255\n") + '\x00' + '\x80' + '\xff');
  EXPECT_EQ(io::save_preview(dir / "c", Field(Shape{2, 2, 3}, 0.0)).extension(), ".ppm");
  EXPECT_EQ(fs::file_size(dir / "c.ppm"), std::string("P6\n2 2\n255\n").size() + 12);
  fs::remove_all(dir);
}

TEST(Csv, Quoting) {
  EXPECT_EQ(io::csv_quote("plain"), "plain");
  EXPECT_EQ(io::csv_quote("a,b"), "\"a,b\"");
  EXPECT_EQ(io::csv_quote("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(io::csv_quote("two\nlines"), "\"two\nlines\"");
}

TEST(Csv, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678, 0.0}) {
    EXPECT_EQ(std::stod(io::format_double(v)), v);
  }
  EXPECT_EQ(io::format_double(0.1), "0.1");
}

TEST(Config, DefaultsRenderAndReparse) {
  const RunConfig d;
  const RunConfig back = parse_config(render_config(d));
  EXPECT_EQ(config_items(back), config_items(d));
  EXPECT_EQ(d.masf.gamma, 0.5);
  EXPECT_EQ(d.masf.stage, MasfStage::frequency_plus_weighting);
}

TEST(Config, ParseAndOverride) {
  RunConfig c = parse_config(
      "# comment line\n"
      "solver = ddpm\n"
      "nfe = 10   # trailing comment\n"
      "masf = data_space_only\n"
      "weight_mode = quadratic\n"
      "gamma = 0.25\n"
      "beta_hf_end = 1.2\n"
      "seed = 99\n");
  EXPECT_EQ(c.solver, SolverKind::ddpm);
  EXPECT_EQ(c.nfe, 10);
  EXPECT_TRUE(c.masf_enabled);
  EXPECT_EQ(c.masf.stage, MasfStage::data_space_only);
  EXPECT_EQ(c.masf.weight_mode, WeightMode::quadratic);
  EXPECT_EQ(c.masf.gamma, 0.25);
  EXPECT_EQ(c.masf.beta_hf_end, 1.2);
  EXPECT_EQ(c.seed, 99u);
  set_config_value(c, "masf", "off");
  EXPECT_FALSE(c.masf_or_none().has_value());
  set_config_value(c, "nfe", "25");
  EXPECT_EQ(c.nfe, 25);
  EXPECT_NO_THROW(validate_config(c));
}

TEST(Config, RejectsBadInput) {
  RunConfig c;
  EXPECT_THROW(set_config_value(c, "nosuchkey", "1"), FormatError);
  EXPECT_THROW(set_config_value(c, "nfe", "ten"), FormatError);
  EXPECT_THROW(set_config_value(c, "gamma", "nan"), FormatError);
  EXPECT_THROW(set_config_value(c, "solver", "euler"), FormatError);
  EXPECT_THROW(set_config_value(c, "seed", "-1"), FormatError);
  EXPECT_THROW(parse_config("just words\n"), FormatError);
}

TEST(Config, Validation) {
  auto invalid = [](const std::string& text) {
    EXPECT_THROW(validate_config(parse_config(text)), ParameterError) << text;
  };
  invalid("nfe = 0");
  invalid("T = 10\nnfe = 11");
  invalid("solver = ddpm\neta = 0.5");
  invalid("oracle = dataset");
  invalid("height = 7");
  invalid("gamma = 1.5");
  invalid("oracle_s2 = 0");
  invalid("num_samples = 0");
  invalid("threads = -1");
  EXPECT_NO_THROW(validate_config(parse_config("solver = ddim\neta = 1\nnfe = 1000")));
}

}  // namespace
}  // namespace masf
