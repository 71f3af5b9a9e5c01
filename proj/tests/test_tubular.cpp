#include <doctest.h>

#include <random>

#include "common.hpp"
#include "fsv/tubular.hpp"

using namespace fsv;
using test::box;
using test::vec;

namespace {

PipelineOptions options_of(const RunConfig& cfg, int depth = 0) {
  PipelineOptions o;
  o.eps0 = cfg.eps0;
  o.M = cfg.M;
  o.refine_depth = depth;
  return o;
}

// Left FN branch on a short slow interval.
struct SmallFn {
  RunConfig cfg = preset("fhn");
  FastSlowSystem sys{cfg.system};
  BranchSpec spec = [this] {
    BranchSpec s = cfg.branches[0];
    s.Y = box({{-2e-4, 9.8e-3}});
    s.subdivisions = {100};
    return s;
  }();
};

}  // namespace

TEST_CASE("a short FN tube is certified") {
  SmallFn fn;
  BranchResult r = run_tube(fn.sys, fn.spec, options_of(fn.cfg));
  CHECK(r.cells.size() == 100);
  CHECK(r.failed() == 0);
  CHECK(r.glue.ok);
  CHECK(r.glue.pairs_checked == 99);
  CHECK(fn.spec.Y[0].subset_of(r.glue.span[0]));
  REQUIRE(r.k);
  CHECK(*r.k >= 1);
  CHECK_NOTHROW(require_certified(r));
  for (const auto& c : r.cells) {
    REQUIRE(c.target);
    CHECK(c.seed_in_target.subset_interior(c.target->box.z));
    REQUIRE(c.order);
    CHECK(c.order->status == RateStatus::Ok);
    // The rate condition margins of each target.
    CHECK(c.rates->mu_s1 < 0.0);
    CHECK(c.rates->xi_u1 > 0.0);
  }
}

TEST_CASE("the slow manifold's equilibrium sits inside each seed") {
  SmallFn fn;
  BranchResult r = run_bundle(fn.sys, fn.spec, options_of(fn.cfg));
  REQUIRE(r.ok());
  for (std::size_t i = 0; i < r.cells.size(); i += 7) {
    const CellResult& c = r.cells[i];
    const AffineChart& ch = c.seed->chart;
    for (double t : {0.0, 0.5, 1.0}) {
      Vec y = vec({c.Y[0].lo() + t * c.Y[0].width()});
      Vec x = newton_equilibrium(fn.sys, ch.x_bar, y);
      Vec z = ch.P_mid().inverse() * (x - ch.x_bar - ch.slope * (y - ch.y_bar));
      for (int d = 0; d < 2; ++d) CHECK(c.seed->box.z[d].contains(z(d)));
    }
  }
}

TEST_CASE("every sampled target carries a sign-change box of the fast field") {
  // Unstable components point out of their faces and stable ones inward,
  // for frozen y and eps in [0, eps0].
  SmallFn fn;
  BranchResult r = run_tube(fn.sys, fn.spec, options_of(fn.cfg));
  REQUIRE(r.ok());
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> U(0, 1);
  int wrong = 0;
  for (int s = 0; s < 1000; ++s) {
    const CellResult& c = r.cells[rng() % r.cells.size()];
    const AffineChart& ch = c.target->chart;
    const IVector& z = c.target->box.z;
    Vec y = vec({c.Y[0].lo() + U(rng) * c.Y[0].width()});
    const double eps = fn.cfg.eps0 * U(rng);
    Mat Pi = ch.P_mid().inverse();
    for (int i = 0; i < 2; ++i)
      for (int side : {-1, 1}) {
        Vec zz = vec({z[0].lo() + U(rng) * z[0].width(), z[1].lo() + U(rng) * z[1].width()});
        zz(i) = side > 0 ? z[i].hi() : z[i].lo();
        Vec x = ch.P_mid() * zz + ch.x_bar + ch.slope * (y - ch.y_bar);
        const double out = side * (Pi * fn.sys.f_point(x, y, eps))(i);
        if (i < ch.n_u ? !(out > 0) : !(out < 0)) ++wrong;
      }
  }
  CHECK(wrong == 0);
}

TEST_CASE("cells across the FN fold fail") {
  // The right branch folds at w = max u(u - a)(1 - u), about 0.0848.
  SmallFn fn;
  fn.spec = fn.cfg.branches[1];
  fn.spec.Y = box({{0.07, 0.1}});
  fn.spec.subdivisions = {30};
  BranchResult r = run_tube(fn.sys, fn.spec, options_of(fn.cfg, 2));
  CHECK_FALSE(r.ok());
  REQUIRE(r.failed() > 0);
  CHECK(r.cells.front().ok());
  for (const auto& c : r.cells)
    if (c.Y[0].contains(0.0848)) CHECK_FALSE(c.ok());
  CHECK_THROWS_AS(require_certified(r), CellFailed);
}

TEST_CASE("a tube radius below the seed extent fails the inclusion test") {
  SmallFn fn;
  fn.spec.eta_u = fn.spec.eta_s = 1e-9;
  fn.spec.subdivisions = {4};
  BranchResult r = run_tube(fn.sys, fn.spec, options_of(fn.cfg));
  REQUIRE(r.failed() == 4);
  for (const auto& c : r.cells) CHECK((c.failed_at == Stage::Inclusion || c.failed_at == Stage::Target));
  if (r.cells[0].failed_at == Stage::Inclusion) CHECK_THROWS_AS(require_certified(r), InclusionFailed);
  CHECK_THROWS_AS(require_certified(r), CellFailed);
}

TEST_CASE("an overlong unstable cone fails") {
  SmallFn fn;
  fn.spec.subdivisions = {10};
  PipelineOptions o = options_of(fn.cfg);
  BranchResult tube = run_tube(fn.sys, fn.spec, o);
  REQUIRE(tube.ok());
  BranchResult cone = run_cone(fn.sys, tube, fn.spec.M_u, fn.spec.M_s, 10.0, fn.spec.l_s, o);
  CHECK(cone.failed() == 10);
  for (const auto& c : cone.cells) CHECK(c.failed_at == Stage::Cone);
  CHECK_THROWS_AS(require_certified(cone), ConeFailed);
}

TEST_CASE("glue reports the cells that do not fit") {
  SmallFn fn;
  fn.spec.subdivisions = {10};
  BranchResult r = run_bundle(fn.sys, fn.spec, options_of(fn.cfg));
  REQUIRE(r.ok());

  std::vector<CellResult> missing = r.cells;
  missing.erase(missing.begin() + 4);
  GlueCertificate g = glue(missing, fn.spec);
  CHECK_FALSE(g.ok);
  REQUIRE_FALSE(g.failures.empty());
  BranchResult holed = r;
  holed.cells = missing;
  holed.glue = g;
  try {
    require_certified(holed);
    FAIL("expected GlueFailed");
  } catch (const GlueFailed& e) {
    CHECK(e.a == 3);
    CHECK(std::string(e.what()).find("cells 3 and 3") != std::string::npos);
  }

  std::vector<CellResult> gap = r.cells;
  gap[6].Y = box({{gap[6].Y[0].lo() + 1e-5, gap[6].Y[0].hi()}});
  GlueCertificate h = glue(gap, fn.spec);
  CHECK_FALSE(h.ok);
  CHECK(h.first_failure == std::pair<std::size_t, std::size_t>{5, 6});
}

TEST_CASE("predator-prey cones on a small patch") {
  RunConfig cfg = preset("predprey");
  FastSlowSystem sys(cfg.system);
  for (BranchSpec spec : cfg.branches) {
    spec.Y = box({{0.5, 0.503}, {-0.1, -0.097}});
    spec.subdivisions = {3, 3};
    BranchResult r = run_branch(sys, spec, Mode::Cone, options_of(cfg));
    CAPTURE(spec.name);
    CHECK(r.ok());
    CHECK(r.glue.pairs_checked == 12);
    for (const auto& c : r.cells) {
      REQUIRE(c.cone_u);
      CHECK(c.cone_u->M == doctest::Approx(1.1));
      CHECK(c.cone_u->holds);
      CHECK(c.cone_s->holds);
    }
  }
}

TEST_CASE("parallel and serial runs agree") {
  SmallFn fn;
  PipelineOptions o = options_of(fn.cfg, 2);
  fn.spec.Y = box({{-0.03, 0.01}});
  fn.spec.subdivisions = {40};
  BranchResult a = run_tube(fn.sys, fn.spec, o);
  o.jobs = 4;
  BranchResult b = run_tube(fn.sys, fn.spec, o);
  REQUIRE(a.cells.size() == b.cells.size());
  CHECK(a.k == b.k);
  CHECK(a.glue.failures == b.glue.failures);
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].grid == b.cells[i].grid);
    CHECK(a.cells[i].path == b.cells[i].path);
    CHECK(a.cells[i].failed_at == b.cells[i].failed_at);
    if (a.cells[i].target) CHECK(a.cells[i].target->box.z.subset_of(b.cells[i].target->box.z));
  }
}

TEST_CASE("configuration errors") {
  SmallFn fn;
  BranchSpec s = fn.spec;
  s.subdivisions = {0};
  CHECK_THROWS_AS(run_tube(fn.sys, s, options_of(fn.cfg)), ConfigError);
  s = fn.spec;
  s.x0 = vec({0});
  CHECK_THROWS_AS(run_tube(fn.sys, s, options_of(fn.cfg)), ConfigError);
  PipelineOptions o = options_of(fn.cfg);
  o.eps0 = -1.0;
  CHECK_THROWS_AS(run_tube(fn.sys, fn.spec, o), ConfigError);
}
