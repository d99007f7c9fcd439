#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef DYADIC_LAB_BIN
#error "DYADIC_LAB_BIN must point at the command line tool"
#endif

namespace {

int raw(const std::string& cmd) {
  int status = std::system(cmd.c_str());
  if (status < 0) return -1;
#ifdef WEXITSTATUS
  return WEXITSTATUS(status);
#else
  return status;
#endif
}

int run(const std::string& args) {
  return raw(std::string(DYADIC_LAB_BIN) + " " + args);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string temp_path(const std::string& name) {
  return "/tmp/dyadic_cli_" + name;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("characteristic subcommand reports and exits cleanly") {
  std::string out = temp_path("a2.json");
  CHECK(run("a2 --depth 6 --family power --param -0.5 --json " + out +
            " > /dev/null") == 0);
  std::string text = slurp(out);
  CHECK(text.find("\"constant\"") != std::string::npos);
  CHECK(text.find("\"argmax\"") != std::string::npos);
}

TEST_CASE("bad invocations exit with the usage code") {
  CHECK(run("a2 --no-such-flag 2> /dev/null") == 2);
  CHECK(run("a2 --depth 99 2> /dev/null") == 2);
  CHECK(run("frobnicate 2> /dev/null") == 2);
  CHECK(run("sweep --depth 6 2> /dev/null") == 2);  // no weights given
  CHECK(run("verify --config /nonexistent.json 2> /dev/null") == 2);
  CHECK(run("report --in /nonexistent.csv 2> /dev/null") == 2);
}

TEST_CASE("verification gates its exit code on the checks") {
  CHECK(run("verify --depth 5 --instances 2 --only expectation-algebra "
            "> /dev/null") == 0);
  // a missing baseline file fails the baseline-backed check
  CHECK(run("verify --depth 5 --instances 2 --only linear-bound "
            "--baseline /nonexistent.json > /dev/null") == 1);
}

TEST_CASE("shift construction prints certificates") {
  std::string out = temp_path("shift.json");
  CHECK(run("build-shift --depth 6 --type petermichl --samples 8 --json " +
            out + " > /dev/null") == 0);
  std::string text = slurp(out);
  CHECK(text.find("\"unconditionality\"") != std::string::npos);
  CHECK(text.find("\"blocks\"") != std::string::npos);
}

TEST_CASE("sweep output is byte-identical across job counts") {
  std::string one = temp_path("sweep1.csv");
  std::string four = temp_path("sweep4.csv");
  std::string flags =
      "sweep --depth 7 --type petermichl --family power "
      "--params=-0.5,-0.8,-0.9,-0.95 ";
  CHECK(run(flags + "--jobs 1 --out " + one) == 0);
  CHECK(run(flags + "--jobs 4 --out " + four) == 0);
  std::string a = slurp(one);
  std::string b = slurp(four);
  REQUIRE(!a.empty());
  CHECK(a == b);
}

TEST_CASE("report consumes sweep output and fits a slope") {
  std::string csv = temp_path("report_in.csv");
  CHECK(run("sweep --depth 7 --type petermichl --family power "
            "--params=-0.8,-0.9,-0.95,-0.98 --out " +
            csv) == 0);
  std::string fit = temp_path("fit.json");
  CHECK(run("report --in " + csv + " --fit " + fit + " > /dev/null") == 0);
  std::string text = slurp(fit);
  CHECK(text.find("\"slope\"") != std::string::npos);
  CHECK(text.find("\"r2\"") != std::string::npos);
  // an unreachable slope cap turns into a failure exit
  CHECK(run("report --in " + csv + " --max-slope 0.01 > /dev/null "
            "2> /dev/null") == 1);
}

TEST_CASE("decompose reports the split and the stopping family") {
  std::string out = temp_path("decompose.json");
  CHECK(run("decompose --depth 6 --type petermichl --family power "
            "--param -0.5 --json " +
            out + " > /dev/null") == 0);
  std::string text = slurp(out);
  CHECK(text.find("\"gap\"") != std::string::npos);
  CHECK(text.find("\"stopping\"") != std::string::npos);
  CHECK(text.find("\"norm_u\"") != std::string::npos);
}

TEST_CASE("environment seed steers seeded constructions") {
  std::string first = temp_path("env1.json");
  std::string second = temp_path("env2.json");
  std::string third = temp_path("env3.json");
  std::string tail = std::string(DYADIC_LAB_BIN) +
                     " a2 --depth 6 --family random --param 8 --json ";
  CHECK(raw("DYADIC_LAB_SEED=100 " + tail + first + " > /dev/null") == 0);
  CHECK(raw("DYADIC_LAB_SEED=100 " + tail + second + " > /dev/null") == 0);
  CHECK(raw("DYADIC_LAB_SEED=101 " + tail + third + " > /dev/null") == 0);
  REQUIRE(!slurp(first).empty());
  CHECK(slurp(first) == slurp(second));
  CHECK(slurp(first) != slurp(third));
  CHECK(raw("DYADIC_LAB_SEED=abc " + tail + "/dev/null 2> /dev/null") == 2);
}

}  // TEST_SUITE
