#include <doctest.h>

#include <random>
#include <string>

#include "carlasso/error.hpp"
#include "carlasso/formula.hpp"
#include "carlasso/ingest.hpp"

using namespace carlasso;

namespace {

ErrorKind kind_of(std::string_view text) {
  try {
    parse_formula(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error for: " << std::string(text));
  return ErrorKind::IoError;
}

std::size_t offset_of(std::string_view text) {
  try {
    parse_formula(text);
  } catch (const Error& e) {
    REQUIRE(e.offset.has_value());
    return *e.offset;
  }
  FAIL("expected an error for: " << std::string(text));
  return 0;
}

}  // namespace

TEST_SUITE("formula") {

TEST_CASE("gut formula keeps order of both sides") {
  auto f = parse_formula(
      "Alistipes + Bacteroides + Eubacterium + Parabacteroides + all_others ~ BMI + Age + Gender + Stratum");
  CHECK(f.responses == std::vector<std::string>{"Alistipes", "Bacteroides", "Eubacterium", "Parabacteroides",
                                                "all_others"});
  CHECK(f.predictors == std::vector<std::string>{"BMI", "Age", "Gender", "Stratum"});
}

TEST_CASE("minimal formula") {
  auto f = parse_formula("y1 ~ x1");
  CHECK(f.responses == std::vector<std::string>{"y1"});
  CHECK(f.predictors == std::vector<std::string>{"x1"});
  CHECK(f.raw_text == "y1 ~ x1");
}

TEST_CASE("whitespace and newlines between tokens") {
  auto f = parse_formula("  a\n+\tb.c  ~\r\n _x + y.2 ");
  CHECK(f.responses == std::vector<std::string>{"a", "b.c"});
  CHECK(f.predictors == std::vector<std::string>{"_x", "y.2"});
}

TEST_CASE("structural errors") {
  CHECK(kind_of("~ x1") == ErrorKind::EmptySide);
  CHECK(kind_of("y1 ~ ") == ErrorKind::EmptySide);
  CHECK(kind_of("y1 + y2") == ErrorKind::MissingTilde);
  CHECK(kind_of("") == ErrorKind::MissingTilde);
  CHECK(kind_of("y ~ x ~ z") == ErrorKind::MissingTilde);
  CHECK(kind_of("y + y ~ x") == ErrorKind::DuplicateName);
  CHECK(kind_of("y ~ x + x") == ErrorKind::DuplicateName);
  CHECK(kind_of("y ~ y") == ErrorKind::DuplicateName);
}

TEST_CASE("unsupported syntax is InvalidIdentifier with a named operator") {
  for (const char* text : {"y ~ a:b", "y ~ a*b", "y ~ x - 1", "y ~ log(x)", "y ~ (1|g)", "y ~ .", "y ~ 1 + x",
                           "y ~ x^2", "y ~ a/b", "y ~ a b", "y ~ x +", "y ~ + x", "y ~ .x", "2y ~ x"}) {
    CAPTURE(text);
    CHECK(kind_of(text) == ErrorKind::InvalidIdentifier);
  }
  try {
    parse_formula("y ~ a:b");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("':'") != std::string::npos);
  }
  try {
    parse_formula("y ~ .");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("wildcard") != std::string::npos);
  }
}

TEST_CASE("offsets point inside the offending token") {
  CHECK(offset_of("y ~ a:b") == 5);
  CHECK(offset_of("y ~ x - 1") == 6);
  CHECK(offset_of("yy + yy ~ x") == 5);
  CHECK(offset_of("y ~ x ~ z") == 6);
  CHECK(offset_of("y ~ a b") == 6);
}

TEST_CASE("render round trip") {
  auto f = parse_formula("a+b   ~c+\n d");
  CHECK(render(f) == "a + b ~ c + d");
  CHECK(parse_formula(render(f)) == f);
}

TEST_CASE("arbitrary bytes give a spec or a located error") {
  std::mt19937_64 gen(17);
  const std::string alphabet = "ab_.+~ \n:*-()1|^/\x01\xff";
  for (int trial = 0; trial < 20000; ++trial) {
    std::string s(gen() % 24, ' ');
    for (auto& c : s) c = (trial % 2) ? alphabet[gen() % alphabet.size()] : static_cast<char>(gen() & 0xff);
    try {
      auto f = parse_formula(s);
      CHECK(!f.responses.empty());
      CHECK(!f.predictors.empty());
      CHECK(parse_formula(render(f)) == f);
    } catch (const Error& e) {
      REQUIRE(e.offset.has_value());
      CHECK(*e.offset < std::max<std::size_t>(s.size(), 1));
    }
  }
}

TEST_CASE("validate_against_table") {
  DataTable t({"y1", "x1", "x2", "g"},
              {DataTable::NumericColumn{1, 2}, DataTable::NumericColumn{3, 4}, DataTable::NumericColumn{5, 6},
               DataTable::CategoricalColumn{"a", "b"}});
  auto b = validate_against_table(parse_formula("y1 ~ x1 + g"), t);
  REQUIRE(b.responses.size() == 1);
  CHECK(b.responses[0].index == 0);
  CHECK(b.predictors[0].index == 1);
  CHECK(b.predictors[1].kind == ColumnKind::Categorical);

  try {
    validate_against_table(parse_formula("y1 ~ Weight"), t);
    FAIL("expected UnknownColumn");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownColumn);
    CHECK(e.column == "Weight");
  }
  try {
    validate_against_table(parse_formula("y1 ~ x3"), t);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("did you mean 'x1'") != std::string::npos);
  }
}

}
