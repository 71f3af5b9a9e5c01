#include <doctest.h>

#include <cmath>
#include <random>

#include "fsv/symexpr.hpp"
#include "fsv/system.hpp"

using namespace fsv;

namespace {

Env thin(std::initializer_list<std::pair<const char*, double>> xs) {
  Env e;
  for (auto& [k, v] : xs) e[k] = Interval(v);
  return e;
}

std::map<std::string, double> point(const Env& e) {
  std::map<std::string, double> p;
  for (auto& [k, v] : e) p[k] = v.mid();
  return p;
}

}  // namespace

TEST_CASE("parse and evaluate") {
  Interval r = eval(parse("u*(u-a)*(1-u)"), thin({{"u", 0.0}, {"a", 0.3}}));
  CHECK(r.contains(0.0));
  Expr fen = parse("r*(1-r^2)*cos(theta) - z*sin(theta)");
  for (double th : {0.0, 0.7, 2.0, 5.5}) CHECK(eval(fen, thin({{"r", 1}, {"z", 0}, {"theta", th}})).contains(0.0));
  CHECK(eval(parse("-2^2"), {}).contains(-4.0));
  CHECK(eval(parse("2*-3"), {}).contains(-6.0));
  CHECK(eval(parse("exp(0) + sqrt(4) / 2"), {}).contains(2.0));
  CHECK(eval(parse("1.5e-3"), {}).contains(1.5e-3));
}

TEST_CASE("parse errors") {
  try {
    parse("u*(");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position == 3);
  }
  CHECK_THROWS_AS(parse("1 +"), ParseError);
  CHECK_THROWS_AS(parse("(1"), ParseError);
  CHECK_THROWS_AS(parse("x^y"), ParseError);
  CHECK_THROWS_AS(parse("foo(1)"), ParseError);
  CHECK_THROWS_AS(parse("1 2"), ParseError);
  CHECK_THROWS_AS(eval(parse("x + 1"), {}), UnknownSymbol);
}

TEST_CASE("decimal literals are enclosed") {
  CHECK(decimal_enclosure("0.5").is_thin());
  CHECK(decimal_enclosure("-0.25").is_thin());
  Interval t = decimal_enclosure("0.1");
  CHECK_FALSE(t.is_thin());
  CHECK(t.lo() < 0.1);
  CHECK(t.hi() > 0.1);
  Interval n = decimal_enclosure("-0.3");
  CHECK(n.lo() < -0.3);
  CHECK(n.hi() > -0.3);
  CHECK_THROWS_AS(decimal_enclosure("0.1x"), ParseError);
}

TEST_CASE("differentiation examples") {
  Expr f = parse("u*(u-a)*(1-u)");
  Interval d = eval(diff(f, "u"), thin({{"u", 0.0}, {"a", 0.3}}));
  CHECK(d.lo() <= -0.3);
  CHECK(d.hi() >= -0.3);
  CHECK(d.width() < 1e-14);
  CHECK(diff(parse("3.5"), "u").is_zero());
  CHECK(diff(parse("v"), "u").is_zero());
  CHECK(diff(parse("u"), "u").is_one());
  // d/du [-u(1-u)(u-v)] at u = 1 equals 1 - v.
  Expr pp = parse("-u*(1-u)*(u-v)");
  for (double v : {0.2, 0.5, 0.97}) CHECK(eval(diff(pp, "u"), thin({{"u", 1.0}, {"v", v}})).contains(1.0 - v));
}

TEST_CASE("derivatives agree with central differences") {
  const char* exprs[] = {"u*(u-a)*(1-u)",
                         "r*(1-r^2)*cos(theta) - z*sin(theta)",
                         "(c*v - u*(u - a)*(1 - u) + w)/delta",
                         "exp(-u^2)*sin(3*v) + sqrt(1 + u^2*v^2)",
                         "u^5 - 2*u^3*v + v/(2 + cos(u))"};
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  int checked = 0;
  for (const char* src : exprs) {
    Expr e = parse(src);
    for (const auto& var : e.free_vars()) {
      Expr de = diff(e, var);
      for (int s = 0; s < 50; ++s) {
        Env env;
        for (const auto& v : e.free_vars()) env[v] = Interval(U(rng));
        if (env.count("delta")) env["delta"] = Interval(9.0);
        if (env.count("r")) env["r"] = Interval(1.0 + 0.3 * U(rng));
        auto p = point(env);
        const double h = 1e-6;
        auto plus = p, minus = p;
        plus[var] += h;
        minus[var] -= h;
        double fd = (eval_point(e, plus) - eval_point(e, minus)) / (2 * h);
        double ex = eval_point(de, p);
        if (std::fabs(ex) < 1e-3) continue;  // degenerate points
        CHECK(std::fabs(fd - ex) <= 1e-6 * std::fabs(ex));
        CHECK(eval(de, env).contains(ex));
        ++checked;
      }
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("thin evaluation matches floating evaluation") {
  Expr e = parse("(c*v - u*(u - a)*(1 - u) + w)/delta + exp(u)*cos(v)");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-2, 2);
  for (int i = 0; i < 2000; ++i) {
    Env env = thin({{"u", U(rng)}, {"v", U(rng)}, {"w", U(rng)}, {"a", 0.25}, {"c", 0.75}, {"delta", 8.0}});
    Interval r = eval(e, env);
    double f = eval_point(e, point(env));
    double m = r.mid();
    double ulp = std::nextafter(std::fabs(f), INFINITY) - std::fabs(f);
    CHECK(r.contains(f));
    CHECK(std::fabs(m - f) <= 4 * ulp + 1e-300 + r.rad());
  }
}

TEST_CASE("jacobian") {
  std::vector<Expr> f = {parse("v"), parse("(c*v - u*(u - a)*(1 - u) + w)/delta")};
  Env env = thin({{"u", 0}, {"v", 0}, {"w", 0}, {"a", 0.3}, {"c", 0.8}, {"delta", 9}});
  IMatrix J = jacobian(f, {"u", "v"}, env);
  CHECK(J(0, 0).contains(0.0));
  CHECK(J(0, 1).contains(1.0));
  CHECK(J(1, 0).contains(0.3 / 9));
  CHECK(J(1, 1).contains(0.8 / 9));
  Env wide = env;
  wide["u"] = Interval(-0.1, 0.1);
  IMatrix Jw = jacobian(f, {"u", "v"}, wide);
  CHECK(J.subset_of(Jw));
  std::vector<Expr> lin = {parse("2*x - y"), parse("x + 3*y")};
  IMatrix L = jacobian(lin, {"x", "y"}, thin({{"x", 5}, {"y", -7}}));
  CHECK(L(0, 0) == Interval(2));
  CHECK(L(0, 1) == Interval(-1));
  CHECK(L(1, 0) == Interval(1));
  CHECK(L(1, 1) == Interval(3));
}

TEST_CASE("compiled programs agree with tree evaluation") {
  Expr e = parse("u*(u-a)*(1-u) + sin(v)^2");
  Program p(e, {"u", "v", "a"});
  Interval slots[] = {Interval(0.1, 0.2), Interval(-1, 1), Interval(0.3)};
  Env env{{"u", slots[0]}, {"v", slots[1]}, {"a", slots[2]}};
  CHECK(p.eval(slots) == eval(e, env));
  double ds[] = {0.15, 0.5, 0.3};
  CHECK(p.eval(ds) == doctest::Approx(eval_point(e, {{"u", 0.15}, {"v", 0.5}, {"a", 0.3}})));
}

TEST_CASE("fast-slow system wrapper") {
  SystemSpec s;
  s.fast = {"u", "v"};
  s.slow = {"w"};
  s.params = {{"a", decimal_enclosure("0.3")}, {"delta", Interval(9)}, {"c", Interval(0.799, 0.801)}};
  s.f = {"v", "(c*v - u*(u - a)*(1 - u) + w)/delta"};
  s.g = {"(u - 10*w)/c"};
  FastSlowSystem sys(s);
  CHECK(sys.n() == 2);
  CHECK(sys.l() == 1);
  IVector x{Interval(0), Interval(0)};
  IVector y{Interval(0)};
  IMatrix fx = sys.fx(x, y, Interval(0, 1e-4));
  CHECK(fx(1, 0).contains(0.3 / 9));
  CHECK(fx(1, 1).contains(0.8 / 9));
  FieldJet j = sys.jet(x, y, Interval(0));
  CHECK(j.fy(1, 0).contains(1.0 / 9));
  CHECK(j.gx(0, 0).contains(1.0 / 0.8));
  CHECK(j.f[0].contains(0.0));
  SystemSpec bad = s;
  bad.f[1] = "q + u";
  CHECK_THROWS_AS(FastSlowSystem{bad}, UnknownSymbol);
}
