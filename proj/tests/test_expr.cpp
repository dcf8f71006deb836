#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <string>
#include <vector>

#include "mpray/expr.hpp"
#include "oracles.hpp"

using namespace mpray;

namespace {

struct CorpusEntry {
  int dim;
  std::string src;
};

std::vector<CorpusEntry> load_corpus() {
  std::ifstream in(std::string(MPRAY_TEST_DATA_DIR) + "/expr_corpus.txt");
  REQUIRE(in.good());
  std::vector<CorpusEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto bar = line.find('|');
    REQUIRE(bar != std::string::npos);
    entries.push_back({std::stoi(line.substr(0, bar)), line.substr(bar + 1)});
  }
  return entries;
}

// Deterministic sample points inside [0.25, 0.85]^dim, away from domain edges.
Vec sample_point(int dim, int which) {
  Vec x(dim);
  for (int i = 0; i < dim; ++i) {
    const double t = 0.17 + 0.193 * which + 0.29 * i;
    x[i] = 0.25 + 0.6 * (t - std::floor(t));
  }
  return x;
}

}  // namespace

TEST_CASE("power operator is right-associative and unary minus binds looser", "[expr]") {
  const Vec none(1);
  CHECK(Expr::parse("2^3^2", 1).eval(none) == 512.0);
  CHECK(Expr::parse("(2^3)^2", 1).eval(none) == 64.0);
  CHECK(Expr::parse("2^-3", 1).eval(none) == 0.125);
  Vec x(1);
  x[0] = 3.0;
  CHECK(Expr::parse("-x1^2", 1).eval(x) == -9.0);
  CHECK(Expr::parse("1+2*3^2", 1).eval(none) == 19.0);
  CHECK(Expr::parse("0^0", 1).eval(none) == 1.0);  // convention: 0^0 = 1
}

TEST_CASE("division chains associate left and whitespace is ignored", "[expr]") {
  Vec x(3);
  x[0] = 8.0; x[1] = 4.0; x[2] = 2.0;
  CHECK(Expr::parse("x1/x2/x3", 3).eval(x) == 1.0);
  Vec y(1);
  y[0] = 1.0;
  CHECK(Expr::parse(" x1 + 2 ", 1).eval(y) == 3.0);
}

TEST_CASE("canonical printing preserves structure", "[expr]") {
  CHECK(Expr::parse("x1 + x2*x2", 2).str() == "x1+x2*x2");
  CHECK(Expr::parse("-(x1*x2)", 2).str() == "-(x1*x2)");
  CHECK(Expr::parse("2^3^2", 1).str() == "2^3^2");
  CHECK(Expr::parse("(2^3)^2", 1).str() == "(2^3)^2");
  CHECK(Expr::parse("x1-(x2-0.125)", 2).str() == "x1-(x2-0.125)");
  CHECK(Expr::parse("x1-x2-0.125", 2).str() == "x1-x2-0.125");
  CHECK(Expr::parse("1e-2*x1", 1).str() == "0.01*x1");
}

TEST_CASE("corpus round-trips through print and parse", "[expr]") {
  for (const auto& entry : load_corpus()) {
    INFO("expression: " << entry.src);
    const Expr e1 = Expr::parse(entry.src, entry.dim);
    const Expr e2 = Expr::parse(e1.str(), entry.dim);
    CHECK(e2 == e1);
    CHECK(e2.str() == e1.str());
  }
}

TEST_CASE("corpus jets agree with extrapolated finite differences", "[expr]") {
  for (const auto& entry : load_corpus()) {
    INFO("expression: " << entry.src);
    const Expr e = Expr::parse(entry.src, entry.dim);
    testing::ScalarFn value = [&](const Vec& x) { return e.eval(x); };
    for (int s = 0; s < 3; ++s) {
      const Vec x = sample_point(entry.dim, s);
      const Jet2 j = e.jet2(x);
      CHECK(j.v == e.eval(x));  // jet value path is bit-identical to eval
      for (int i = 0; i < entry.dim; ++i) {
        const double fd = testing::fd_partial(value, x, i);
        CHECK_THAT(j.g[i], Catch::Matchers::WithinAbs(fd, 1e-6 * std::max(1.0, std::abs(fd))));
      }
      for (int i = 0; i < entry.dim; ++i)
        for (int k = 0; k < entry.dim; ++k) {
          const double fd = testing::fd_second(value, x, i, k);
          CHECK_THAT(j.h(i, k),
                     Catch::Matchers::WithinAbs(fd, 1e-6 * std::max(1.0, std::abs(fd))));
        }
    }
  }
}

TEST_CASE("parse errors carry byte offsets", "[expr]") {
  auto offset_of = [](const char* src, int dim) -> std::size_t {
    try {
      (void)Expr::parse(src, dim);
    } catch (const ParseError& err) {
      return err.offset;
    }
    FAIL("expected ParseError");
    return static_cast<std::size_t>(-1);
  };
  CHECK(offset_of("x1 + + x2", 2) == 5);
  CHECK(offset_of("sin(x1,x2)", 2) == 6);
  CHECK(offset_of("foo(x1)", 2) == 0);
  CHECK(offset_of("x3+1", 2) == 0);
  CHECK(offset_of("(x1+1", 2) == 5);
  CHECK(offset_of("", 2) == 0);
  CHECK(offset_of("x1 x2", 2) == 3);
  CHECK_THROWS_AS(Expr::parse("1e999", 1), ParseError);
}

TEST_CASE("domain errors carry the location of the failing operation", "[expr]") {
  Vec x(1);
  x[0] = 1.0;
  try {
    (void)Expr::parse("log(x1-2)", 1).eval(x);
    FAIL("expected DomainError");
  } catch (const DomainError& err) {
    CHECK(err.offset == 0);
  }
  x[0] = 0.0;
  try {
    (void)Expr::parse("1/x1", 1).eval(x);
    FAIL("expected DomainError");
  } catch (const DomainError& err) {
    CHECK(err.offset == 1);
  }
  // sqrt(0) has a value but no derivative.
  x[0] = 0.0;
  const Expr s = Expr::parse("sqrt(x1)", 1);
  CHECK(s.eval(x) == 0.0);
  CHECK_THROWS_AS(s.jet2(x), DomainError);
}
