#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

const std::string kCli = RFK_CLI;
const std::string kData = RFK_TEST_DATA;

int run(const std::string& args) {
  const std::string cmd = "'" + kCli + "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string capture(const std::string& args) {
  std::string out;
  FILE* p = popen(("'" + kCli + "' " + args + " 2>/dev/null").c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  pclose(p);
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("verify exit codes") {
  CHECK(run("verify --config " + kData + "/a1.json --out cli_a1.json --csv cli_a1.csv") == 0);
  CHECK(run("--validate cli_a1.json") == 0);
  CHECK(run("--validate cli_a1.csv") == 0);
  CHECK(run("validate --kind report cli_a1.json") == 0);
  CHECK(run("verify --config " + kData + "/bad.json") == 2);
  CHECK(run("verify --config " + kData + "/a1.json --check invariance --perturb 0.01") == 1);
  CHECK(run("verify --config /no/such/file.json") == 2);
  CHECK(run("verify --config " + kData + "/a1.json --check bogus") == 2);
  CHECK(run("verify") == 2);
  CHECK(run("frobnicate") == 2);
}

TEST_CASE("determinism across runs") {
  REQUIRE(run("verify --config " + kData + "/a1.json --seed 4 --check ricci --out cli_d1.json") == 0);
  REQUIRE(run("verify --config " + kData + "/a1.json --seed 4 --check ricci --out cli_d2.json") == 0);
  auto strip = [](std::string s) {
    const auto t = s.find("\"timing\"");
    REQUIRE(t != std::string::npos);
    return s.substr(0, t);
  };
  CHECK(strip(slurp("cli_d1.json")) == strip(slurp("cli_d2.json")));
}

TEST_CASE("sample") {
  const std::string one = R"('{"schema":"1","d":1,"n":1,"m":0,"centers":[[0,0,0]]}')";
  const std::string single = capture("sample --config " + one + " --point 0.3,1.0,0.2,0.1");
  CHECK(single.find("riem_sq") != std::string::npos);
  CHECK(std::count(single.begin(), single.end(), '\n') == 2);

  const std::string two = R"('{"schema":"1","d":2,"n":1,"m":0,"centers":[[0,1,0],[0,-1,0]]}')";
  CHECK(run("sample --config " + two + " --grid 100 --out cli_g1.csv") == 0);
  CHECK(run("sample --config " + two + " --grid 100 --out cli_g2.csv") == 0);
  const std::string g1 = slurp("cli_g1.csv");
  CHECK(g1 == slurp("cli_g2.csv"));
  CHECK(std::count(g1.begin(), g1.end(), '\n') == 101);
  CHECK(run("--validate cli_g1.csv") == 0);

  const std::string flagged =
      capture("sample --config " + two + " --source hitchin --point 0.3,0.5,0,0");
  CHECK(flagged.find("chart-boundary") != std::string::npos);
  CHECK(run("sample --config " + two) == 2);
  CHECK(run("sample --config " + two + " --point 1,2") == 2);
}

TEST_CASE("fit") {
  const std::string two = R"('{"schema":"1","d":2,"n":1,"m":0,"centers":[[0,1,0],[0,-1,0]]}')";
  const std::string tn = R"('{"schema":"1","d":1,"n":1,"m":0,"centers":[[0,0,0]],"mode":"alf"}')";
  CHECK(run("fit --config " + two + " --kind volume --out cli_fit.json") == 0);
  CHECK(run("fit --config " + tn + " --kind volume") == 0);
  CHECK(run("fit --config " + two + " --kind decay") == 0);
  CHECK(run("fit --config " + tn + " --kind decay") == 2);
  CHECK(slurp("cli_fit.json").find("\"slope\"") != std::string::npos);
}

TEST_CASE("validate rejects malformed documents") {
  {
    std::ofstream("cli_bad.csv") << "c0,c1\n1,2\n3\n";
    std::ofstream("cli_bad.json") << R"({"schema":"1","d":1,"n":2,"m":1,"radii":[[1,0]],"x":1})";
  }
  CHECK(run("--validate cli_bad.csv") == 1);
  CHECK(run("--validate cli_bad.json") == 1);
  CHECK(run("--validate " + kData + "/a1.json") == 0);
  CHECK(run("--validate /no/such/file") == 2);
}
