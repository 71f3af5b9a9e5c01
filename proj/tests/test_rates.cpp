#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <random>

#include "common.hpp"
#include "fsv/rates.hpp"

using namespace fsv;
using test::box;
using test::vec;

namespace {

FastSlowSystem decoupled() {
  SystemSpec s;
  s.fast = {"a", "b"};
  s.slow = {"y"};
  s.f = {"2*a", "-b"};
  s.g = {"0"};
  return FastSlowSystem(s);
}

double l_exact(const Mat& a) {
  if (a.size() == 0) return -INFINITY;
  return Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (a + a.transpose())).eigenvalues().maxCoeff();
}
double ml_exact(const Mat& a) {
  if (a.size() == 0) return INFINITY;
  return Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (a + a.transpose())).eigenvalues().minCoeff();
}
double norm_exact(const Mat& a) { return a.size() == 0 ? 0.0 : Eigen::JacobiSVD<Mat>(a).singularValues()(0); }

// Rate constants of a single point matrix, straight from their definitions.
RateConstants exact_rates(const Mat& J, int n_u, int n_s, double M) {
  AugmentedBlocks b = split_blocks(to_imatrix(J), n_u, n_s);
  auto m = [](const IMatrix& x) { return mid(x); };
  RateConstants r;
  r.M = M;
  r.mu_s1 = l_exact(m(b.Fb_b)) + norm_exact(m(b.Fb_ay)) / M;
  r.mu_s2 = l_exact(m(b.Fb_b)) + M * norm_exact(m(b.Fay_b));
  r.xi_u1 = ml_exact(m(b.Fa_a)) - norm_exact(m(b.Fa_by)) / M;
  r.xi_u2 = ml_exact(m(b.Fa_a)) - M * norm_exact(m(b.Fa_by));
  r.mu_ss1 = l_exact(m(b.Fby_by)) + M * norm_exact(m(b.Fby_a));
  r.mu_ss2 = l_exact(m(b.Fby_by)) + norm_exact(m(b.Fa_by)) / M;
  r.xi_su1 = ml_exact(m(b.Fay_ay)) - M * norm_exact(m(b.Fay_b));
  r.xi_su2 = ml_exact(m(b.Fay_ay)) - norm_exact(m(b.Fb_ay)) / M;
  return r;
}

// Augmented Jacobian in (z, w, eta) at one point, derived by hand from
// x = P z + x_bar + S w, y = y_bar + w, eps = eps0 * eta.
Mat point_jacobian(const FastSlowSystem& sys, const AffineChart& c, const Vec& z, const Vec& w, double eta,
                   double eps0) {
  const int n = static_cast<int>(sys.n()), l = static_cast<int>(sys.l());
  const double eps = eps0 * eta;
  Mat P = c.P_mid(), Pi = P.inverse(), S = c.slope;
  Vec x = P * z + c.x_bar + S * w, y = c.y_bar + w;
  FieldJet j = sys.jet(to_ivector(x), to_ivector(y), Interval(eps));
  Mat fx = mid(j.fx), fy = mid(j.fy), gx = mid(j.gx), gy = mid(j.gy);
  Vec g = mid(j.g), fe = mid(j.feps), ge = mid(j.geps);
  Mat J = Mat::Zero(n + l + 1, n + l + 1);
  J.block(0, 0, n, n) = Pi * (fx - eps * S * gx) * P;
  J.block(0, n, n, l) = Pi * (fx * S + fy - eps * S * (gx * S + gy));
  J.block(0, n + l, n, 1) = eps0 * Pi * (fe - S * g - eps * S * ge);
  J.block(n, 0, l, n) = eps * gx * P;
  J.block(n, n, l, l) = eps * (gx * S + gy);
  J.block(n, n + l, l, 1) = eps0 * (g + eps * ge);
  return J;
}

struct FnSeed {
  FastSlowSystem sys = test::system_of("fhn");
  IVector Y = box({{-1e-4, 0.0}});
  Vec y = vec({-5e-5});
  AffineChart chart = build_chart(sys, newton_equilibrium(sys, vec({0, 0}), y), y);
  FastSaddleBlock seed = construct_block(sys, chart, Y, 1e-4, chart.lambda_re, BlockOptions{});
};

Mat diag(std::initializer_list<double> d) {
  Mat m = Mat::Zero(d.size(), d.size());
  int i = 0;
  for (double v : d) m(i, i) = v, ++i;
  return m;
}

}  // namespace

TEST_CASE("augmented blocks of a decoupled linear field") {
  FastSlowSystem sys = decoupled();
  AffineChart c = build_chart(sys, vec({0, 0}), vec({0}));
  IVector z = box({{-0.1, 0.1}, {-0.1, 0.1}});
  AugmentedBlocks b = augmented_jacobian_blocks(sys, c, z, box({{0, 1}}), 1e-3);
  CHECK(b.Fa_a(0, 0).contains(2.0));
  CHECK(b.Fa_a(0, 0).width() < 1e-14);
  CHECK(b.Fb_b(0, 0).contains(-1.0));
  for (const IMatrix* m : {&b.Fa_by, &b.Fb_ay, &b.Fby_a, &b.Fay_b})
    for (std::size_t i = 0; i < m->rows(); ++i)
      for (std::size_t j = 0; j < m->cols(); ++j) CHECK((*m)(i, j).mag() < 1e-14);
  for (double M : {2.0, 10.0, 100.0}) {
    RateConstants r = compute_rates(b, M);
    CHECK(r.mu_s1 == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(r.xi_u1 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rate_order(r).k >= 1);
    CHECK(cone_check(r, ConeKind::Unstable).holds);
    CHECK(cone_check(r, ConeKind::Stable).holds);
  }
  // With eps0 = 0 the slow rows vanish.
  TransformedJet t = transformed_jet(sys, c, z, box({{0, 1}}), 0.0);
  IMatrix J = augmented_jacobian(t, 1);
  for (std::size_t j = 0; j < J.cols(); ++j) {
    CHECK(J(2, j) == Interval(0.0));
    CHECK(J(3, j) == Interval(0.0));
  }
}

TEST_CASE("rate constant preconditions") {
  AugmentedBlocks b = split_blocks(to_imatrix(diag({2, -1, 0})), 1, 1);
  CHECK_THROWS_AS(compute_rates(b, 1.0), ConfigError);
  CHECK_THROWS_AS(compute_rates(split_blocks(to_imatrix(diag({-1, 0})), 0, 1), 10.0), HyperbolicityViolated);
}

TEST_CASE("order scan against hand evaluation and the floor formulas") {
  // a' = 2a, b' = -b, center rate 0.1: (j+1) 0.1 < 2 holds up to j = 18.
  RateConstants r = compute_rates(split_blocks(to_imatrix(diag({2, -1, 0.1})), 1, 1), 10.0);
  CHECK(r.mu_ss1 == doctest::Approx(0.1));
  CHECK(r.xi_su1 == doctest::Approx(0.1));
  RateOrder o = rate_order(r);
  REQUIRE(o.status == RateStatus::Ok);
  CHECK(o.k == 18);
  // The floor formulas pair mu_s2 and mu_ss2 with xi_su1; they are reported,
  // not used, and here they disagree with the scan.
  CHECK(o.k_su_ratio == doctest::Approx(-10.0));
  CHECK(o.k_ss_ratio == doctest::Approx(1.0));
  CHECK(o.k_floor == -1);
  // Frozen slow variables: every order holds up to the cap.
  CHECK(rate_order(compute_rates(split_blocks(to_imatrix(diag({2, -1, 0})), 1, 1), 10.0)).k == kMaxOrder);
  // No gap in the stable direction.
  RateOrder bad = rate_order(compute_rates(split_blocks(to_imatrix(diag({2, 0.01, 0})), 1, 1), 10.0));
  CHECK(bad.status == RateStatus::NoHyperbolicity);
  CHECK(bad.k == -1);
  // Strong a <- y coupling breaks mu_ss2 < xi_u1 only: order 0.
  Mat J = diag({2, -1, 1.5});
  J(0, 2) = 3.0;
  RateOrder zero = rate_order(compute_rates(split_blocks(to_imatrix(J), 1, 1), 10.0));
  CHECK(zero.status == RateStatus::Ok);
  CHECK(zero.k == 0);
}

TEST_CASE("coupling moves mu_s1 by at most c/M") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0, 1);
  for (int t = 0; t < 200; ++t) {
    const double c = U(rng), M = 1.5 + 20 * U(rng);
    Mat J = diag({2, -1, 0.05});
    RateConstants r0 = compute_rates(split_blocks(to_imatrix(J), 1, 1), M);
    J(1, 2) = c;
    RateConstants r1 = compute_rates(split_blocks(to_imatrix(J), 1, 1), M);
    CHECK(r1.mu_s1 - r0.mu_s1 <= c / M * (1 + 1e-12) + 1e-15);
    CHECK(r1.mu_s1 >= r0.mu_s1);
  }
}

TEST_CASE("FN origin seed rates") {
  FnSeed fn;
  REQUIRE(fn.seed.certified());
  AugmentedBlocks b = augmented_jacobian_blocks(fn.sys, fn.chart, fn.seed.box.z, fn.Y, 1e-4);
  for (std::size_t j = 0; j < b.Fb_ay.cols(); ++j) CHECK(b.Fb_ay(0, j).mag() < 0.05);
  RateConstants r = compute_rates(b, 10.0);
  CHECK(r.xi_u1 > 0.2);
  CHECK(r.mu_s1 < -0.13);
  CHECK(rate_order(r).status == RateStatus::Ok);
}

TEST_CASE("rate constants bound 1e3 sampled point rates") {
  FnSeed fn;
  const AffineChart& c = fn.chart;
  // A box wider than the seed exercises the nonlinear terms.
  IVector z = box({{-0.02, 0.02}, {-0.02, 0.02}});
  const double M = 10.0, eps0 = 1e-4;
  RateConstants r = compute_rates(augmented_jacobian_blocks(fn.sys, c, z, fn.Y, eps0), M);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> U(0, 1);
  int violations = 0;
  for (int s = 0; s < 1000; ++s) {
    Vec zz = vec({-0.02 + 0.04 * U(rng), -0.02 + 0.04 * U(rng)});
    Vec w = vec({-1e-4 * U(rng) - c.y_bar(0)});
    RateConstants p = exact_rates(point_jacobian(fn.sys, c, zz, w, U(rng), eps0), c.n_u, c.n_s, M);
    const double tol = 1e-12;
    bool ok = p.mu_s1 <= r.mu_s1 + tol && p.mu_s2 <= r.mu_s2 + tol && p.mu_ss1 <= r.mu_ss1 + tol &&
              p.mu_ss2 <= r.mu_ss2 + tol && p.xi_u1 >= r.xi_u1 - tol && p.xi_u2 >= r.xi_u2 - tol &&
              p.xi_su1 >= r.xi_su1 - tol && p.xi_su2 >= r.xi_su2 - tol;
    if (!ok) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("refining a cell does not lower the order") {
  FnSeed fn;
  IVector z = box({{-0.02, 0.02}, {-0.02, 0.02}});
  auto k_on = [&](const IVector& Y) {
    return rate_order(compute_rates(augmented_jacobian_blocks(fn.sys, fn.chart, z, Y, 1e-4), 10.0)).k;
  };
  const int parent = k_on(box({{-0.01, 0.01}}));
  CHECK(k_on(box({{-0.01, 0.0}})) >= parent);
  CHECK(k_on(box({{0.0, 0.01}})) >= parent);
}

TEST_CASE("inflow modification by PSD terms keeps the inequalities") {
  // Expansion added to the unstable block and contraction to the stable block
  // can only improve every pointwise rate.
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(-1, 1);
  int checked = 0;
  for (int t = 0; t < 300; ++t) {
    Mat J = diag({1, 0.8, -0.5, 0.05});
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (i != j) J(i, j) += 0.05 * U(rng);
    Mat G = Mat::NullaryExpr(2, 2, [&] { return U(rng); });
    Mat K = J;
    K.block(0, 0, 2, 2) += G * G.transpose();
    K(2, 2) -= std::fabs(U(rng));
    RateOrder a = rate_order(exact_rates(J, 2, 1, 5.0));
    RateOrder b = rate_order(exact_rates(K, 2, 1, 5.0));
    if (a.status != RateStatus::Ok) continue;
    ++checked;
    CHECK(b.status == RateStatus::Ok);
    CHECK(b.k >= a.k);
  }
  CHECK(checked > 100);
}

TEST_CASE("cone margins grow with M toward the uncoupled gap") {
  Mat J = diag({2, -1, 0});
  J(0, 1) = 0.3;  // a depends on b: only the unstable cone feels 1/M
  double prev = -INFINITY;
  for (double M : {1.5, 2.0, 5.0, 10.0, 100.0, 1e4}) {
    ConeCertificate u = cone_check(compute_rates(split_blocks(to_imatrix(J), 1, 1), M), ConeKind::Unstable);
    CHECK(u.holds);
    CHECK(u.margin_cone >= prev);
    prev = u.margin_cone;
  }
  CHECK(prev == doctest::Approx(2.0).epsilon(1e-3));
  ConeCertificate s = cone_check(compute_rates(split_blocks(to_imatrix(diag({2, -1, 0})), 1, 1), 10.0),
                                 ConeKind::Stable);
  CHECK(s.holds);
  CHECK(s.margin_graph == doctest::Approx(1.0));
  CHECK(s.margin_cone == doctest::Approx(1.0));
  // Strong b -> a coupling destroys the stable cone.
  Mat K = diag({2, -1, 0});
  K(0, 1) = 1.0;
  CHECK_FALSE(cone_check(compute_rates(split_blocks(to_imatrix(K), 1, 1), 10.0), ConeKind::Stable).holds);
}
