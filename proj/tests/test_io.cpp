#include "wcpd/errors.hpp"
#include "wcpd/image.hpp"
#include "wcpd/trace_io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace wcpd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(std::string const &name)
{
  fs::path const dir = fs::temp_directory_path() / "wcpd_test_io";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(fs::path const &p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(std::string const &s)
{
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) { out.push_back(line); }
  return out;
}

} // namespace

TEST_CASE("binary PGM round trip is byte-identical")
{
  auto const img = phantom(32);
  auto const bytes = format_pgm(img);
  CHECK(bytes.rfind("P5\n32 32\n255\n", 0) == 0);
  CHECK(bytes.size() == 13 + 32 * 32);
  auto const back = parse_pgm(bytes);
  CHECK(back.n == 32);
  CHECK(format_pgm(back) == bytes);

  auto const path = scratch("round.pgm");
  write_pgm(path, back);
  CHECK(slurp(path) == bytes);
  CHECK(read_pgm(path).pixels == back.pixels);
}

TEST_CASE("ASCII PGM with comments")
{
  auto const img = parse_pgm("P2\n# a comment\n2 2\n# another\n4\n0 1\n2 4\n");
  CHECK(img.n == 2);
  CHECK(img.maxval == 4);
  CHECK(img.pixels[0] == 0.0);
  CHECK(img.pixels[1] == 0.25);
  CHECK(img.pixels[3] == 1.0);
  auto const again = parse_pgm(format_pgm(img, PgmFormat::Ascii));
  CHECK(again.pixels == img.pixels);
}

TEST_CASE("16-bit PGM")
{
  std::string bytes = "P5\n2 2\n65535\n";
  for (int v : {0, 256, 65535, 1}) {
    bytes.push_back(static_cast<char>(v >> 8));
    bytes.push_back(static_cast<char>(v & 0xff));
  }
  auto const img = parse_pgm(bytes);
  CHECK(img.maxval == 65535);
  CHECK(img.pixels[1] == doctest::Approx(256.0 / 65535));
  CHECK(img.pixels[2] == 1.0);
  CHECK(format_pgm(img) == bytes);
}

TEST_CASE("malformed PGM reports a byte offset")
{
  auto offset_of = [](std::string const &bytes) -> long {
    try {
      parse_pgm(bytes);
    } catch (ImageFormatError const &e) {
      return static_cast<long>(e.offset());
    }
    return -1;
  };
  CHECK(offset_of("P7\n2 2\n255\n") == 0);
  CHECK(offset_of("P5\n2 x\n255\n") == 5);
  CHECK(offset_of("P5\n2 2\n255\nab") == 13);
  CHECK(offset_of("P2\n2 2\n255\n1 2 3 999\n") >= 11);
  CHECK(offset_of("P5\n2 2\n0\n") >= 0);
  CHECK_THROWS_AS(parse_pgm("P2\n3 2\n255\n1 2 3 4 5 6\n"), ImageFormatError);
  CHECK_THROWS_AS(read_pgm(scratch("missing.pgm")), IoError);
}

TEST_CASE("trace rows")
{
  TraceRow row;
  row.n = 3;
  row.dist = 0.5;
  row.eps = 0.1;
  CHECK(format_trace_row(row) == "3,0.5,,0.10000000000000001,,");
  TraceRow full{4, 1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK(format_trace_row(full) == "4,1,2,3,4,5");
  double const x = 0.1 + 0.2;
  CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("metadata round trip")
{
  auto const meta = trace_metadata("example3", Regime::DualFirst, {0.75, 0.25, 1.0}, 42);
  CHECK(meta.at("experiment") == "example3");
  CHECK(meta.at("regime") == "dual-first");
  CHECK(meta.at("seed") == "42");
  CHECK(std::stod(meta.at("sigma")) == 0.75);
  auto const path = scratch("m.meta");
  write_metadata(path, meta);
  CHECK(read_metadata(path) == meta);
  CHECK(metadata_path("out/trace.csv") == fs::path("out/trace.csv.meta"));
}

TEST_CASE("streamed trace leaves a readable prefix")
{
  auto const path = scratch("stream.csv");
  {
    TraceWriter w(path);
    for (int k = 0; k < 3; ++k) {
      TraceRow r;
      r.n = k;
      r.dist = 1.0 / (k + 1);
      w.write(r);
    }
    auto const partial = lines_of(slurp(path));
    REQUIRE(partial.size() == 4);
    CHECK(partial[0] == kTraceHeader);
    CHECK(partial[3] == "2,0.33333333333333331,,,,");
    Metadata m{{"stop", "max_iters"}};
    w.finish(m, metadata_path(path));
  }
  CHECK(read_metadata(metadata_path(path)).at("stop") == "max_iters");
  CHECK_THROWS_AS(TraceWriter(scratch("no/such/dir/t.csv")), IoError);
}

TEST_CASE("whole-trace and contour CSV")
{
  IterateTrace t;
  t.rows.resize(2);
  t.rows[0].n = 0;
  t.rows[1].n = 1;
  t.rows[1].residual = 0.25;
  auto const path = scratch("whole.csv");
  write_trace_csv(path, t);
  CHECK(lines_of(slurp(path)) == std::vector<std::string>{kTraceHeader, "0,,,,,", "1,,,,,0.25"});

  auto const cpath = scratch("contour.csv");
  write_contour_csv(cpath, {{0.0, 1.0, -0.5}, {0.5, 1.0, 2.0}});
  CHECK(lines_of(slurp(cpath)) == std::vector<std::string>{"x,y,value", "0,1,-0.5", "0.5,1,2"});
}
