#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "common.hpp"

using namespace eppmzi;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("eppmzi_io_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(Csv, FormatRoundTripsExactly) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(rng) * std::pow(10.0, k % 30 - 15);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
}

TEST(Csv, WriteThenRead) {
  const auto path = temp_file("table.csv");
  CsvTable t{{"tau_fs", "re", "im"}, {{-1.0, 0.0, 1.0}, {0.1, 0.2, 1.0 / 3.0}, {std::numeric_limits<double>::quiet_NaN(), 5.0, -7.25}}};
  write_csv(path, t);
  const std::string text = slurp(path);
  EXPECT_EQ(text.rfind("tau_fs,re,im\n", 0), 0u);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_EQ(count(text, "\n"), 4u);
  const auto back = read_csv(path);
  EXPECT_EQ(back.header, t.header);
  ASSERT_EQ(back.rows(), 3u);
  EXPECT_EQ(back.column("re"), t.columns[1]);
  EXPECT_TRUE(std::isnan(back.column("im")[0]));
  EXPECT_EQ(back.column("im")[2], -7.25);
  EXPECT_THROW(back.column("missing"), std::runtime_error);
  std::filesystem::remove(path);
}

TEST(Csv, Errors) {
  const auto path = temp_file("bad.csv");
  EXPECT_THROW(write_csv(path, CsvTable{{"a", "b"}, {{1.0}}}), std::invalid_argument);
  EXPECT_THROW(write_csv(path, CsvTable{{"a", "b"}, {{1.0}, {1.0, 2.0}}}), std::invalid_argument);
  std::ofstream(path) << "a,b\n1,2\n3\n";
  EXPECT_THROW(read_csv(path), std::runtime_error);
  std::ofstream(path) << "";
  EXPECT_THROW(read_csv(path), std::runtime_error);
  std::filesystem::remove(path);
  EXPECT_THROW(read_csv(path), std::runtime_error);
  EXPECT_THROW(write_csv("/nonexistent_dir/x.csv", CsvTable{{"a"}, {{1.0}}}), std::runtime_error);
}

TEST(Svg, StandaloneLinePlot) {
  PlotSpec plot{"Z & friends", "delay (fs)", "rate <norm>", {{"amp", {0.0, 1.0, 2.0, 3.0}, {1.0, 2.0, std::nan(""), 4.0}}}};
  const std::string svg = render_svg(plot);
  EXPECT_EQ(svg.rfind("<svg xmlns=\"http://www.w3.org/2000/svg\"", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(svg.find("href"), std::string::npos);
  EXPECT_NE(svg.find("delay (fs)"), std::string::npos);
  EXPECT_NE(svg.find("rate &lt;norm&gt;"), std::string::npos);
  EXPECT_NE(svg.find("Z &amp; friends"), std::string::npos);
  // The NaN splits the series into two polylines.
  EXPECT_EQ(count(svg, "<polyline"), 2u);
}

TEST(Svg, DegenerateDataStillRenders) {
  PlotSpec flat{"flat", "x", "y", {{"", {0.0, 1.0}, {0.5, 0.5}}}};
  EXPECT_NE(render_svg(flat).find("<polyline"), std::string::npos);
  PlotSpec empty{"empty", "x", "y", {}};
  EXPECT_NE(render_svg(empty).find("</svg>"), std::string::npos);
}

TEST(Svg, RenderingIsDeterministic) {
  PlotSpec plot{"t", "x", "y", {{"s", {0.0, 0.1, 0.2}, {1.0, -1.0, 0.25}}}};
  EXPECT_EQ(render_svg(plot), render_svg(plot));
}
