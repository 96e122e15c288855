#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#ifndef AID_CLI_PATH
#error "AID_CLI_PATH must point at the CLI binary"
#endif
#ifndef AID_FIXTURES
#error "AID_FIXTURES must point at the fixture directory"
#endif

namespace {

struct RunResult {
  int rc = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string scratch(const std::string& name) {
  return "/tmp/aid_cli_" + std::to_string(::getpid()) + "_" + name;
}

RunResult run(const std::string& args) {
  static int counter = 0;
  std::string out_path = scratch("out" + std::to_string(counter));
  std::string err_path = scratch("err" + std::to_string(counter));
  ++counter;
  std::string cmd = std::string(AID_CLI_PATH) + " " + args + " > " + out_path + " 2> " + err_path;
  int status = std::system(cmd.c_str());
  RunResult r;
  r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

std::string fixture(const std::string& name) { return std::string(AID_FIXTURES) + "/" + name; }

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::istringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

TEST_CASE("help exits cleanly") {
  CHECK(run("--help").rc == 0);
  CHECK(run("build --help").rc == 0);
}

TEST_CASE("build then verify and evaluate") {
  std::string path = scratch("reveal.json");
  auto built = run("build --prior " + fixture("p1.json") + " --kind fully-revealing -o " + path);
  CHECK(built.rc == 0);

  auto verified = run("verify " + path + " -o -");
  CHECK(verified.rc == 0);
  auto report = nlohmann::json::parse(verified.out);
  CHECK(report["bne"]["is_bne"].get<bool>());
  CHECK(report["construction"] == "fully-revealing");

  auto evaluated = run("evaluate " + path + " -o -");
  CHECK(evaluated.rc == 0);
  auto pay = nlohmann::json::parse(evaluated.out);
  CHECK(pay["bidder_surplus"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(pay["revenue"].get<double>() == doctest::Approx(0.25).epsilon(1e-9));
  std::remove(path.c_str());
}

TEST_CASE("built structures round trip through disk byte for byte") {
  std::string a = scratch("strict_a.json");
  std::string b = scratch("strict_b.json");
  CHECK(run("build --prior " + fixture("p1.json") + " --kind strict --eps 0.1 --K 32 -o " + a).rc == 0);
  CHECK(run("build --prior " + fixture("p1.json") + " --kind strict --eps 0.1 --K 32 -o " + b).rc == 0);
  auto bytes_a = slurp(a);
  CHECK_FALSE(bytes_a.empty());
  CHECK(bytes_a == slurp(b));
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST_CASE("full extraction verifies at the default tolerance") {
  std::string path = scratch("extract.json");
  CHECK(run("build --prior " + fixture("p1.json") + " --kind full-extraction --K 16 -o " + path).rc == 0);
  auto verified = run("verify " + path + " -o -");
  CHECK(verified.rc == 0);
  auto report = nlohmann::json::parse(verified.out);
  CHECK(report["independence_gap"].get<double>() <= 1e-10);
  CHECK(report["payoffs"]["revenue"].get<double>() == doctest::Approx(0.75).epsilon(1e-9));
  std::remove(path.c_str());
}

TEST_CASE("verification failure exits with 4") {
  std::string built = scratch("tamper.json");
  CHECK(run("build --prior " + fixture("p1.json") + " --kind fully-revealing -o " + built).rc == 0);
  auto j = nlohmann::json::parse(slurp(built));
  // overbidding the low flip and underbidding the high one is exploitable
  j["strategy"] = nlohmann::json::array({nlohmann::json::array({0.0, 0.3}),
                                         nlohmann::json::array({0.0, 0.6})});
  {
    std::ofstream out(built);
    out << j.dump(2) << "\n";
  }
  auto verified = run("verify " + built + " -o -");
  CHECK(verified.rc == 4);
  auto report = nlohmann::json::parse(verified.out);
  CHECK_FALSE(report["bne"]["is_bne"].get<bool>());
  CHECK(report["bne"]["worst_gain"].get<double>() == doctest::Approx(0.2).epsilon(1e-9));
  std::remove(built.c_str());
}

TEST_CASE("validation errors exit with 2 and emit machine-readable json") {
  auto r = run("build --prior " + fixture("badnorm.json") + " --kind fully-revealing -o -");
  CHECK(r.rc == 2);
  auto err = nlohmann::json::parse(r.err);
  CHECK(err["error"] == "NotNormalized");
  CHECK(err.contains("message"));

  auto unknown = run("build --prior " + fixture("p1.json") + " --kind nonsense -o -");
  CHECK(unknown.rc == 2);

  auto missing = run("build --prior /nonexistent.json --kind fully-revealing -o -");
  CHECK(missing.rc == 2);
  CHECK(nlohmann::json::parse(missing.err)["error"] == "IoError");
}

TEST_CASE("constructor infeasibility exits with 3") {
  auto r = run("build --prior " + fixture("delta1.json") + " --kind strict --eps 0.1 -o -");
  CHECK(r.rc == 3);
  CHECK(nlohmann::json::parse(r.err)["error"] == "WindowUnderflow");
}

TEST_CASE("alpha frontier emits a monotone constant-welfare sweep") {
  auto r = run("frontier --prior " + fixture("p1.json") + " --kind alpha --steps 11 -o -");
  CHECK(r.rc == 0);
  auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 12);
  CHECK(split_csv(lines[0])[0] == "alpha");

  double prev = -1.0;
  for (size_t i = 1; i < lines.size(); ++i) {
    auto cells = split_csv(lines[i]);
    REQUIRE(cells.size() >= 8);
    double bs = std::stod(cells[3]);
    double rev = std::stod(cells[4]);
    CHECK(bs + rev == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(rev >= prev - 1e-12);
    CHECK(cells.back() == "1");  // is_bne
    prev = rev;
  }
  // endpoints approach the pure-surplus and pure-revenue corners
  CHECK(std::stod(split_csv(lines[1])[4]) <= 0.02);
  CHECK(std::stod(split_csv(lines[11])[4]) >= 0.73);

  // deterministic bytes
  CHECK(run("frontier --prior " + fixture("p1.json") + " --kind alpha --steps 11 -o -").out == r.out);
}

TEST_CASE("ipv frontier sweeps surplus monotonically") {
  auto r = run("frontier --prior " + fixture("p1.json") + " --kind ipv --steps 6 --t 1 --K 16 -o -");
  CHECK(r.rc == 0);
  auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 7);
  CHECK(split_csv(lines[0])[0] == "t");
  double prev = -1.0;
  for (size_t i = 1; i < lines.size(); ++i) {
    double bs = std::stod(split_csv(lines[i])[2]);
    CHECK(bs >= prev - 1e-12);
    prev = bs;
  }
  CHECK(std::stod(split_csv(lines[1])[2]) <= 0.01);
  CHECK(std::stod(split_csv(lines[6])[2]) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("region csv walks the trapezoid") {
  auto r = run("region --prior " + fixture("p1.json") + " -o -");
  CHECK(r.rc == 0);
  auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 17);  // header + 4 vertices + 12 edge samples
  CHECK(lines[0] == "label,bidder_surplus,revenue,achieved_by");

  auto vertex = [&](size_t i) { return split_csv(lines[i]); };
  CHECK(vertex(1)[0] == "A");
  CHECK(std::stod(vertex(1)[1]) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(vertex(2)[0] == "B");
  CHECK(std::stod(vertex(2)[2]) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(vertex(2)[3] == "full-extraction");
  CHECK(vertex(3)[0] == "D");
  CHECK(vertex(4)[0] == "C");

  int mixtures = 0;
  for (size_t i = 5; i < lines.size(); ++i) {
    auto cells = split_csv(lines[i]);
    REQUIRE(cells.size() == 4);
    double bs = std::stod(cells[1]), rev = std::stod(cells[2]);
    double total = bs + rev;
    CHECK(total >= 0.25 - 1e-9);
    CHECK(total <= 0.75 + 1e-9);
    if (cells[3] == "mixture") ++mixtures;
  }
  CHECK(mixtures == 12);

  CHECK(run("region --prior " + fixture("p1.json") + " -o -").out == r.out);
}

TEST_CASE("degenerate prior collapses the region to a segment") {
  auto r = run("region --prior " + fixture("delta1.json") + " -o -");
  CHECK(r.rc == 0);
  auto lines = lines_of(r.out);
  // wel_max = wel_min = 1: only the BS+Rev = 1 edge survives
  REQUIRE(lines.size() >= 5);
  for (size_t i = 1; i < lines.size(); ++i) {
    auto cells = split_csv(lines[i]);
    CHECK(std::stod(cells[1]) + std::stod(cells[2]) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("oracle spot check agrees with the exact payoffs") {
  std::string path = scratch("oracle.json");
  CHECK(run("build --prior " + fixture("p1.json") + " --kind fully-revealing -o " + path).rc == 0);
  auto r = run("oracle " + path + " --seed 99 --steps 50000 -o -");
  CHECK(r.rc == 0);
  auto lines = lines_of(r.out);
  REQUIRE(lines.size() >= 2);
  CHECK(lines[0] == "# seed=99 samples=50000");
  auto body = nlohmann::json::parse(r.out.substr(r.out.find('\n') + 1));
  CHECK(body["ok"].get<bool>());
  CHECK(body["revenue_exact"].get<double>() == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(std::fabs(body["revenue_mc"].get<double>() - 0.25) <= 0.01);

  // the same seed reproduces the same draw
  CHECK(run("oracle " + path + " --seed 99 --steps 50000 -o -").out == r.out);
  std::remove(path.c_str());
}

TEST_CASE("target build hits the requested payoff pair") {
  std::string path = scratch("target.json");
  auto built = run("build --prior " + fixture("p1.json") + " --kind target --R 0.3 --B 0.2 -o " + path);
  CHECK(built.rc == 0);
  auto evaluated = run("evaluate " + path + " -o -");
  auto pay = nlohmann::json::parse(evaluated.out);
  CHECK(pay["revenue"].get<double>() == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(pay["bidder_surplus"].get<double>() == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(pay["construction"] == "mixture");

  auto outside = run("build --prior " + fixture("p1.json") + " --kind target --R 0.5 --B 0.5 -o -");
  CHECK(outside.rc == 2);
  CHECK(nlohmann::json::parse(outside.err)["error"] == "OutsideTrapezoid");
  std::remove(path.c_str());
}
