#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "mtorus/parse.hpp"
#include "mtorus/report.hpp"

using namespace mtorus;

namespace {

struct Output {
  int status;
  std::string out;
};

Output shell(const std::string& cmd) {
  Output r{0, {}};
  FILE* p = popen((cmd + " 2>/dev/null").c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] == '\n') {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  return out;
}

}  // namespace

TEST_CASE("parse examples") {
  const EndoSpec thue_morse = parse("rank 2; a -> a b; b -> b a;");
  CHECK(thue_morse.rank == 2);
  CHECK(thue_morse.endomorphism() == Endomorphism(2, {Word{1, 2}, Word{2, 1}}));

  const EndoSpec psi = parse("rank 3; a -> a b; b -> b a; c -> a;");
  CHECK(psi.endomorphism() == Endomorphism(3, {Word{1, 2}, Word{2, 1}, Word{1}}));

  CHECK_THROWS_WITH_AS(parse("rank 2; a -> a;"), doctest::Contains("missing image for b"), ParseError);

  // inverses, powers, juxtaposition, whitespace
  const EndoSpec s = parse("rank 3;\n  a->a^-1 b^3;\n b -> AB c ;c->1;");
  CHECK(s.images[0] == Word{-1, 2, 2, 2});
  CHECK(s.images[1] == Word{-1, -2, 3});
  CHECK(s.images[2].empty());
  CHECK(s.warnings.empty());
}

TEST_CASE("parse errors carry positions") {
  try {
    parse("rank 2;\na -> a d;\nb -> b;");
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 8);
    CHECK(std::string(e.what()).find("undeclared generator 'd'") != std::string::npos);
  }
  CHECK_THROWS_WITH_AS(parse("rank 2; a -> b; a -> a;"), doctest::Contains("duplicate image for a"), ParseError);
  CHECK_THROWS_WITH_AS(parse("rank 2; a b; b -> a;"), doctest::Contains("expected '->'"), ParseError);
  CHECK_THROWS_WITH_AS(parse("rank 2; a -> b b -> a;"), doctest::Contains("column 18: expected ';'"), ParseError);
  CHECK_THROWS_WITH_AS(parse("a -> b;"), doctest::Contains("expected 'rank'"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("rank 0;"), ParseError);
}

TEST_CASE("non-reduced images are reduced with a warning") {
  const EndoSpec s = parse("rank 2; a -> a b B; b -> b;");
  CHECK(s.images[0] == Word{1});
  REQUIRE(s.warnings.size() == 1);
  CHECK(s.warnings[0].find("image of a") != std::string::npos);
}

TEST_CASE("metadata comments and several specs") {
  const auto specs = parse_all(
      "# name: first\n# expect: Reducible\nrank 1; a -> a^2;\n"
      "# a plain comment\n# name: second\nrank 2; a -> b; b -> a;\n");
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].name == "first");
  CHECK(specs[0].expect == "Reducible");
  CHECK(specs[1].name == "second");
  CHECK(specs[1].expect.empty());
  CHECK_THROWS_AS(parse("rank 1; a -> a; rank 1; a -> a;"), ParseError);
}

TEST_CASE("print round trip") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    EndoSpec s;
    s.rank = std::uniform_int_distribution<int>(1, 5)(rng);
    for (int i = 0; i < s.rank; ++i) {
      s.names.emplace_back(1, static_cast<char>('a' + i));
      std::vector<Letter> ls;
      const int len = std::uniform_int_distribution<int>(0, 8)(rng);
      for (int k = 0; k < len; ++k) {
        const int g = std::uniform_int_distribution<int>(1, s.rank)(rng);
        ls.push_back(std::bernoulli_distribution(0.5)(rng) ? g : -g);
      }
      s.images.emplace_back(ls);
    }
    const EndoSpec back = parse(print(s));
    CHECK(back == s);
    CHECK(print(back) == print(s));
  }
  CHECK(print(parse("rank 2; a -> a B; b -> 1;")) == "rank 2; a -> a B; b -> 1;");
}

TEST_CASE("run: report objects") {
  RunOptions o;
  const Json c = run("classify", parse("rank 2; a -> a b; b -> b a;"), o);
  CHECK(c["schema"] == kSchemaVersion);
  CHECK(c["result"]["verdict"]["type"] == "IrreducibleAtoroidal");
  CHECK(c["result"]["verdict"]["lambda"] == 2.0);
  CHECK(report_status(c) == 0);
  CHECK_FALSE(c.contains("timing_ms"));

  const Json s = run("surface", parse("rank 2; a -> a b; b -> a;"), o);
  const Json& surf = s["result"]["surface"];
  CHECK(surf["g"] == 1);
  CHECK(surf["b"] == 1);
  CHECK(surf["lambda"] == 1.6180339887);
  CHECK(surf["fully_irreducible"] == true);

  const Json t = run("torus", parse("rank 2; a -> b; b -> a;"), o);
  const Json& w = t["result"]["witness"];
  CHECK(w["generators"] == Json::array({"a", "t^2"}));
  CHECK(w["euler_char"] == 0);
  CHECK(t["result"]["chain"]["conclusion"] == "infinite index (stable chain)");

  const Json r = run("report", parse("rank 3; a -> a b; b -> b a; c -> a;"), o);
  CHECK(r["result"]["minimality"]["type"] == "NotMinimal");
  CHECK(report_status(r) == 0);

  for (const auto& cmd : commands()) {
    const Json j = run(cmd, parse("rank 2; a -> a b; b -> a;"), o);
    CHECK_MESSAGE(!j.contains("error"), cmd);
  }

  o.timing = true;
  CHECK(run("tt", parse("rank 1; a -> a^3;"), o).contains("timing_ms"));
}

TEST_CASE("run: module errors become report errors") {
  RunOptions o;
  const Json j = run("torus", parse("rank 1; a -> 1;"), o);
  CHECK(j.contains("error"));
  CHECK(report_status(j) == 2);
  const Json k = run("frobnicate", parse("rank 1; a -> a;"), o);
  CHECK(k["error"] == "unknown command 'frobnicate'");
}

TEST_CASE("run: output is deterministic") {
  RunOptions o;
  for (const char* text : {"rank 2; a -> a b; b -> a;", "rank 2; a -> a b; b -> b a;",
                           "rank 3; a -> a b; b -> b a; c -> a;", "rank 3; a -> b; b -> c; c -> a B;"}) {
    const EndoSpec s = parse(text);
    for (const auto& cmd : commands()) CHECK(dump(run(cmd, s, o)) == dump(run(cmd, s, o)));
  }
  CHECK(rounded(0.1 + 0.2) == 0.3);
  CHECK(rounded(1.0 / 3.0) == 0.3333333333);
}

TEST_CASE("command-line binary") {
  const std::string cli = MTORUS_CLI_PATH;
  const auto dir = std::filesystem::temp_directory_path() / "mtorus_cli_test";
  std::filesystem::create_directories(dir);
  const auto batch = dir / "batch.endo";
  {
    std::ofstream f(batch);
    f << "# name: one\nrank 2; a -> a b; b -> a;\n"
      << "# name: two\nrank 2; a -> b; b -> a;\n"
      << "# name: three\nrank 2; a -> a b; b -> b a;\n"
      << "# name: four\nrank 1; a -> a^2;\n";
  }

  Output r = shell(cli + " classify --json " + batch.string());
  CHECK(r.status == 0);
  const auto serial = lines(r.out);
  REQUIRE(serial.size() == 4);
  const char* names[] = {"one", "two", "three", "four"};
  for (int i = 0; i < 4; ++i) CHECK(Json::parse(serial[i])["input"]["name"] == names[i]);

  r = shell(cli + " classify --json --jobs 4 " + batch.string());
  CHECK(lines(r.out) == serial);

  r = shell("echo 'rank 2; a -> a b; b -> b a;' | " + cli + " classify --json");
  CHECK(r.status == 0);
  CHECK(Json::parse(r.out)["result"]["verdict"]["type"] == "IrreducibleAtoroidal");

  r = shell(cli + " classify -e 'rank 2; a -> a;'");
  CHECK(r.status == 1);
  r = shell(cli + " torus --json -e 'rank 1; a -> 1;'");
  CHECK(r.status == 2);
  r = shell(cli + " surface --kmax 4 --whitehead-depth 2 -e 'rank 2; a -> a b; b -> a;'");
  CHECK(r.status == 0);
  CHECK(r.out.find("g: 1") != std::string::npos);

  std::filesystem::remove_all(dir);
}

TEST_CASE("corpus verdicts match their expect lines") {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(MTORUS_CORPUS_DIR))
    if (e.path().extension() == ".endo") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  CHECK(files.size() == 20);
  for (const auto& f : files) {
    std::ifstream in(f);
    std::stringstream s;
    s << in.rdbuf();
    const EndoSpec spec = parse(s.str());
    REQUIRE_FALSE(spec.expect.empty());
    const Classification c = classify(spec.endomorphism());
    CHECK_MESSAGE(verdict_name(c.verdict) == spec.expect, spec.name);
    CHECK_MESSAGE(c.inconsistency.empty(), spec.name);
  }
}
