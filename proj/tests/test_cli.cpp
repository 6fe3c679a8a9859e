#include "gptw/ansatz.hpp"
#include "gptw/cli.hpp"
#include "gptw/error.hpp"
#include "gptw/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace gptw;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome gptw_run(std::vector<std::string> args) {
  args.insert(args.begin(), "gptw");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("gptw_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

}  // namespace

TEST_CASE("usage errors exit with status 2") {
  CHECK(gptw_run({"--help"}).code == 0);
  CHECK(gptw_run({}).code == 2);
  CHECK(gptw_run({"bogus"}).code == 2);
  CHECK(gptw_run({"spectrum", "--unknown", "1"}).code == 2);
  auto r = gptw_run({"spectrum", "--c", "fast"});
  CHECK(r.code == 2);
  CHECK(r.err.find("not a finite number") != std::string::npos);
  CHECK(gptw_run({"spectrum", "--size", "9"}).code == 2);
  CHECK(gptw_run({"spectrum", "--T", "-1"}).code == 2);
  CHECK(gptw_run({"minimize", "--T", "10", "--size", "16"}).code == 2);  // support too large
  CHECK(gptw_run({"info"}).code == 2);
}

TEST_CASE("config parsing") {
  std::istringstream ok("# comment\n c = 1.5  # trailing\n\nsize=16\nT = 1,2\n");
  auto cfg = cli::parse_config(ok);
  CHECK(cfg.at("c") == "1.5");
  CHECK(cfg.at("size") == "16");
  CHECK(cfg.at("T") == "1,2");
  std::istringstream unknown("speed = 1\n");
  CHECK_THROWS_AS(cli::parse_config(unknown), InvalidArgument);
  std::istringstream malformed("c 1\n");
  CHECK_THROWS_AS(cli::parse_config(malformed), InvalidArgument);
  std::istringstream empty("c =\n");
  CHECK_THROWS_AS(cli::parse_config(empty), InvalidArgument);
}

TEST_CASE("spectrum command, config file and echo") {
  TempDir dir("spectrum");
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "c = 0\nsize = 16\nT = 3\ncount = 2\n";
  }
  auto r = gptw_run({"spectrum", "--config", dir / "run.cfg", "--c", "1", "--out", dir / "o", "--pgm"});
  REQUIRE(r.code == 0);
  // Flag beats file, file beats default.
  const auto echo = slurp(dir.path / "o" / "config.txt");
  CHECK(echo.find("c = 1\n") != std::string::npos);
  CHECK(echo.find("size = 16\n") != std::string::npos);
  CHECK(echo.find("T = 3\n") != std::string::npos);
  CHECK(echo.find("theta = 0\n") != std::string::npos);
  const auto csv = slurp(dir.path / "o" / "spectrum.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(slurp(dir.path / "o" / "positivity.pgm").rfind("P2\n10 10\n", 0) == 0);

  {
    std::ofstream cfg(dir / "bad.cfg");
    cfg << "colour = red\n";
  }
  CHECK(gptw_run({"spectrum", "--config", dir / "bad.cfg", "--out", dir / "o2"}).code == 2);
  CHECK(gptw_run({"spectrum", "--config", dir / "missing.cfg"}).code == 2);
}

TEST_CASE("scan command: constant rows below the case-1 bound, deterministic output") {
  TempDir dir("scan");
  const std::vector<std::string> args = {"scan", "--T", "1.0,1.5,1.8,2.5,3.0,4.0,5.0", "--starts", "6", "--size", "16"};
  auto a = args, b = args;
  a.insert(a.end(), {"--out", dir / "a"});
  b.insert(b.end(), {"--out", dir / "b"});
  REQUIRE(gptw_run(a).code == 0);
  REQUIRE(gptw_run(b).code == 0);
  const auto csv = slurp(dir.path / "a" / "scan.csv");
  CHECK(csv == slurp(dir.path / "b" / "scan.csv"));
  CHECK(slurp(dir.path / "a" / "scan_summary.csv") == slurp(dir.path / "b" / "scan_summary.csv"));
  std::stringstream ss(csv);
  std::string line;
  std::getline(ss, line);
  int checked = 0;
  while (std::getline(ss, line)) {
    auto cells = split(line);
    if (std::stod(cells[0]) <= 1.8) {
      CHECK(cells[1] == "1");
      ++checked;
    }
  }
  CHECK(checked == 3);
}

TEST_CASE("certify a stored plane wave") {
  TempDir dir("certify");
  const auto grid = TorusGrid::cube(2, 64, 4 * std::numbers::pi);
  write_gptw(fs::path(dir / "pw.gptw"), ansatz::plane_wave(-1, 1.0, grid), 1.0);
  auto r = gptw_run({"certify", dir / "pw.gptw", "--out", dir / "o"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("PlaneWave") != std::string::npos);
  const auto csv = slurp(dir.path / "o" / "certificate.csv");
  const auto row = split(csv.substr(csv.find('\n') + 1, csv.rfind('\n') - csv.find('\n') - 1));
  REQUIRE(row.size() == 10);
  for (int k : {6, 7, 8, 9}) CHECK(std::abs(std::stod(row[k])) <= 1e-9);
  CHECK(fs::exists(dir.path / "o" / "config.txt"));
  CHECK(gptw_run({"certify", dir / "nothing.gptw"}).code == 2);
}

TEST_CASE("info reports metadata and rejects truncated files") {
  TempDir dir("info");
  const auto grid = TorusGrid({8, 16}, 3.0);
  write_gptw(fs::path(dir / "f.gptw"), ComplexField::constant(grid, 1.0), 0.5);
  auto r = gptw_run({"info", dir / "f.gptw"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("sizes 8 16\n") != std::string::npos);
  CHECK(r.out.find("speed 0.5\n") != std::string::npos);
  CHECK(r.out.find("classification UnitConstant\n") != std::string::npos);

  const auto bytes = slurp(dir.path / "f.gptw");
  {
    std::ofstream os(dir / "cut.gptw", std::ios::binary);
    os << bytes.substr(0, bytes.size() - 5);
  }
  auto bad = gptw_run({"info", dir / "cut.gptw"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("truncated") != std::string::npos);
}

TEST_CASE("minimize command writes fields and reports non-convergence") {
  TempDir dir("minimize");
  auto r = gptw_run({"minimize", "--T", "32", "--size", "64", "--out", dir / "o"});
  REQUIRE(r.code == 0);
  for (const char* f : {"field.gptw", "experiment.csv", "report.csv", "config.txt", "progress.log"})
    CHECK(fs::exists(dir.path / "o" / f));
  const auto stored = read_gptw(dir.path / "o" / "field.gptw");
  CHECK(stored.c == 1.0);
  CHECK(stored.field.grid() == TorusGrid::cube(2, 64, 32.0));
  REQUIRE(gptw_run({"minimize", "--T", "32", "--size", "64", "--out", dir / "p"}).code == 0);
  CHECK(slurp(dir.path / "o" / "experiment.csv") == slurp(dir.path / "p" / "experiment.csv"));
  CHECK(slurp(dir.path / "o" / "report.csv") == slurp(dir.path / "p" / "report.csv"));

  auto short_run = gptw_run({"minimize", "--T", "32", "--size", "64", "--max-iters", "2", "--out", dir / "q"});
  CHECK(short_run.code == 3);
  CHECK(fs::exists(dir.path / "q" / "field.gptw"));
}

TEST_CASE("mp command writes the path and the saddle") {
  TempDir dir("mp");
  auto r = gptw_run({"mp", "--T", "30", "--size", "96", "--nodes", "17", "--out", dir / "o"});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir.path / "o" / "path" / "node_000.gptw"));
  CHECK(fs::exists(dir.path / "o" / "path" / "node_016.gptw"));
  CHECK(fs::exists(dir.path / "o" / "saddle.gptw"));
  CHECK(fs::exists(dir.path / "o" / "saddle_certificate.csv"));
  const auto actions = slurp(dir.path / "o" / "path_actions.csv");
  CHECK(std::count(actions.begin(), actions.end(), '\n') == 18);
  const auto summary = slurp(dir.path / "o" / "mp_summary.csv");
  const auto row = split(summary.substr(summary.find('\n') + 1, summary.size() - summary.find('\n') - 2));
  REQUIRE(row.size() == 10);
  CHECK(std::stod(row[4]) > 0.0);
  CHECK(std::stod(row[4]) <= std::stod(row[2]));
  CHECK(row[8] == "1");
  CHECK(row[9] == "1");
  CHECK(gptw_run({"mp", "--T", "20", "--size", "64", "--out", dir / "small"}).code == 2);
}

TEST_CASE("testfn command") {
  TempDir dir("testfn");
  auto r = gptw_run({"testfn", "--R", "4,8", "--out", dir / "o"});
  REQUIRE(r.code == 0);
  const auto csv = slurp(dir.path / "o" / "testfn.csv");
  CHECK(csv.rfind("R,T,size,kinetic,potential,momentum,action\n4,16,64,", 0) == 0);
  CHECK(fs::exists(dir.path / "o" / "testfn_summary.csv"));
  CHECK(gptw_run({"testfn", "--R", "4,x", "--out", dir / "p"}).code == 2);
}
