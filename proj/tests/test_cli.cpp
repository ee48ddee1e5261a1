#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "carlasso/chain_io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string output;  // stdout and stderr interleaved
};

Run run(const std::string& args) {
  const std::string cmd = std::string(CARLASSO_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) r.output += buf.data();
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

struct Workdir {
  fs::path path;
  Workdir() {
    path = fs::temp_directory_path() / ("carlasso_cli_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~Workdir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

int count(const std::string& text, const std::string& needle) {
  int c = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++c;
  return c;
}

const std::string kGutFormula =
    "\"Alistipes+Bacteroides+Eubacterium+Parabacteroides+all_others ~ BMI+Age+Gender+Stratum\"";

std::string gut_fit(const std::string& out, int n_iter = 500) {
  return "fit --formula " + kGutFormula + " --data " + std::string(CARLASSO_SOURCE_DIR) +
         "/data/gut_analog.csv --link logit --adaptive --n-iter " + std::to_string(n_iter) +
         " --burn-in 200 --thin 10 --seed 42 --quiet --out " + out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("fit writes chains and a summary") {
  Workdir w;
  auto r = run(gut_fit(w / "run1"));
  INFO(r.output);
  REQUIRE(r.code == 0);
  CHECK(fs::exists(w / "run1/summary.json"));
  CHECK(fs::exists(w / "run1/chain_1/omega.csv"));
  auto lf = carlasso::read_fit_output(w / "run1");
  CHECK(lf.summary.draw_count == 50);
  CHECK(lf.summary.omega.mean.rows() == 4);
}

TEST_CASE("progress goes to standard error") {
  Workdir w;
  const std::string cmd = std::string(CARLASSO_CLI) + " fit --formula \"y1 + y2 ~ x1\" --data " +
                          std::string(CARLASSO_SOURCE_DIR) + "/tests/data/small.csv --n-iter 100 --burn-in 0 --thin 1 --out " +
                          (w / "p") + " 2>" + (w / "err.txt") + " >" + (w / "out.txt");
  REQUIRE(std::system(cmd.c_str()) == 0);
  const std::string err = carlasso::read_text_file(w / "err.txt");
  CHECK(count(err, "fit: chain 1") >= 10);
  CHECK(carlasso::read_text_file(w / "out.txt").empty());
}

TEST_CASE("flag misuse exits with 2") {
  Workdir w;
  auto missing = run("fit --formula \"y1 ~ x1\" --out " + (w / "o"));
  CHECK(missing.code == 2);
  CHECK(missing.output.find("--data") != std::string::npos);
  CHECK(run("fit --bogus").code == 2);
  CHECK(run("").code == 2);
  CHECK(run(gut_fit(w / "o") + " --link nope").code == 2);
  CHECK(run(gut_fit(w / "o") + " --thin 0").code == 2);
  CHECK(run(gut_fit(w / "o") + " --ci-level 1").code == 2);
  auto few = run(gut_fit(w / "o", 50));
  CHECK(few.code == 1);
  CHECK(few.output.find("InsufficientDraws") != std::string::npos);
  CHECK_FALSE(fs::exists(w / "o"));
}

TEST_CASE("pipeline failures exit with 1 and name the problem") {
  Workdir w;
  auto r = run("fit --formula \"Alistipes ~ Height\" --data " + std::string(CARLASSO_SOURCE_DIR) +
               "/data/gut_analog.csv --quiet --out " + (w / "o"));
  CHECK(r.code == 1);
  CHECK(r.output.find("Height") != std::string::npos);
  CHECK_FALSE(fs::exists(w / "o"));
  CHECK(run("summary --fit " + (w / "nothing")).code == 1);
}

TEST_CASE("help documents every flag with its default") {
  auto fit = run("fit --help");
  CHECK(fit.code == 0);
  for (const char* s : {"--n-iter INT:POSITIVE [5000]", "--burn-in INT:NONNEGATIVE [1000]", "--thin INT:POSITIVE [10]",
                        "[identity]", "[0.9]", "[0.01]", "(default: off)"}) {
    CHECK_MESSAGE(fit.output.find(s) != std::string::npos, s);
  }
  for (const char* sub : {"summary", "graph", "simulate"}) {
    auto r = run(std::string(sub) + " --help");
    CHECK(r.code == 0);
    CHECK(r.output.find("Options:") != std::string::npos);
  }
  CHECK(run("graph --help").output.find("[dot]") != std::string::npos);
}

TEST_CASE("same seed gives byte-identical output") {
  Workdir w;
  REQUIRE(run(gut_fit(w / "a")).code == 0);
  REQUIRE(run(gut_fit(w / "b")).code == 0);
  for (const char* f : {"summary.json", "chain_1/omega.csv", "chain_1/b.csv", "chain_1/lambda_omega.csv", "chain_1/meta.json"}) {
    CHECK_MESSAGE(carlasso::read_text_file(w / ("a/" + std::string(f))) == carlasso::read_text_file(w / ("b/" + std::string(f))), f);
  }
}

TEST_CASE("existing output needs --force") {
  Workdir w;
  REQUIRE(run(gut_fit(w / "a")).code == 0);
  CHECK(run(gut_fit(w / "a")).code == 1);
  CHECK(run(gut_fit(w / "a") + " --force").code == 0);
}

TEST_CASE("graph export of the gut-analog fit") {
  Workdir w;
  REQUIRE(run(gut_fit(w / "a")).code == 0);
  auto r = run("graph --fit " + (w / "a") + " --format dot --out " + (w / "net.dot"));
  REQUIRE(r.code == 0);
  CHECK(r.output.find("nodes: 9 (5 response, 4 predictor)") != std::string::npos);
  const std::string dot = carlasso::read_text_file(w / "net.dot");
  CHECK(count(dot, "shape=circle") == 5);
  CHECK(count(dot, "shape=triangle") == 4);

  for (const char* fmt : {"graphml", "json"}) {
    CHECK(run("graph --fit " + (w / "a") + " --format " + fmt + " --out " + (w / ("net." + std::string(fmt)))).code == 0);
  }
  auto edges_at = [&](const std::string& level) {
    auto g = run("graph --fit " + (w / "a") + " --format json --ci-level " + level + " --out " + (w / "g.json"));
    REQUIRE(g.code == 0);
    const auto pos = g.output.find("edges: ");
    return std::stoi(g.output.substr(pos + 7));
  };
  CHECK(edges_at("0.999") <= edges_at("0.5"));
}

TEST_CASE("corrupted chain file exits with 1 naming it") {
  Workdir w;
  REQUIRE(run(gut_fit(w / "a")).code == 0);
  const std::string omega = w / "a/chain_1/omega.csv";
  std::string text = carlasso::read_text_file(omega);
  text.replace(text.find('\n') + 3, 2, "zz");
  carlasso::write_text_file(omega, text);
  for (const char* sub : {"summary --fit ", "graph --format dot --out /dev/null --fit "}) {
    auto r = run(std::string(sub) + (w / "a"));
    CHECK(r.code == 1);
    CHECK(r.output.find("omega.csv") != std::string::npos);
  }
}

TEST_CASE("summary prints tables or JSON") {
  Workdir w;
  REQUIRE(run(gut_fit(w / "a")).code == 0);
  auto t = run("summary --fit " + (w / "a"));
  CHECK(t.code == 0);
  CHECK(t.output.find("Omega (posterior mean)") != std::string::npos);
  auto j = run("summary --json --fit " + (w / "a"));
  CHECK(j.code == 0);
  CHECK(j.output == carlasso::read_text_file(w / "a/summary.json"));
  auto lvl = run("summary --json --ci-level 0.5 --fit " + (w / "a"));
  CHECK(lvl.output.find("\"level\": 0.5") != std::string::npos);
}

TEST_CASE("simulate writes data and truth") {
  Workdir w;
  auto r = run("simulate --k 6 --p 4 --n 300 --link identity --seed 7 --out " + (w / "sim.csv"));
  REQUIRE(r.code == 0);
  const std::string csv = carlasso::read_text_file(w / "sim.csv");
  CHECK(count(csv, "\n") == 301);
  CHECK(csv.substr(0, csv.find('\n')) == "y1,y2,y3,y4,y5,y6,x1,x2,x3,x4");
  CHECK(fs::exists(w / "sim.truth.json"));
  REQUIRE(run("simulate --k 6 --p 4 --n 300 --seed 7 --out " + (w / "again.csv")).code == 0);
  CHECK(carlasso::read_text_file(w / "again.csv") == csv);
  CHECK(run("simulate --k 1 --link logit --out " + (w / "bad.csv")).code == 2);
  CHECK_FALSE(fs::exists(w / "bad.csv"));
}

}
