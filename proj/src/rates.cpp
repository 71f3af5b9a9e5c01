#include "fsv/rates.hpp"

#include <cmath>
#include <numeric>

namespace fsv {

namespace {

std::vector<int> range(int from, int to) {
  std::vector<int> r(std::max(0, to - from));
  std::iota(r.begin(), r.end(), from);
  return r;
}

std::vector<int> concat(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

double norm_up(const IMatrix& a) { return (a.rows() == 0 || a.cols() == 0) ? 0.0 : op_norm_upper(a); }

// sup { l(A) + s |B| } and inf { ml(A) - s |B| }, rounded outward.
double upper_rate(const IMatrix& A, double s, const IMatrix& B) {
  return (Interval(log_norm_bounds(A).l_upper) + Interval(s) * Interval(norm_up(B))).hi();
}

double lower_rate(const IMatrix& A, double s, const IMatrix& B) {
  return (Interval(log_norm_bounds(A).ml_lower) - Interval(s) * Interval(norm_up(B))).lo();
}

}  // namespace

IMatrix augmented_jacobian(const TransformedJet& t, std::size_t l) {
  const std::size_t n = t.Mz.rows();
  const std::size_t N = n + l + 1;
  IMatrix J(N, N, Interval(0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) J(i, k) = t.Mz(i, k);
    for (std::size_t k = 0; k < l; ++k) J(i, n + k) = t.Mw(i, k);
    J(i, n + l) = t.z_eta[i];
  }
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t k = 0; k < n; ++k) J(n + i, k) = t.gz(i, k);
    for (std::size_t k = 0; k < l; ++k) J(n + i, n + k) = t.gw(i, k);
    J(n + i, n + l) = t.w_eta[i];
  }
  return J;
}

AugmentedBlocks split_blocks(const IMatrix& J, int n_u, int n_s) {
  const int N = static_cast<int>(J.rows());
  auto A = range(0, n_u);
  auto B = range(n_u, n_u + n_s);
  auto Yc = range(n_u + n_s, N);
  auto AY = concat(A, Yc);
  auto BY = concat(B, Yc);
  AugmentedBlocks b;
  b.Fa_a = J.select(A, A);
  b.Fa_by = J.select(A, BY);
  b.Fb_b = J.select(B, B);
  b.Fb_ay = J.select(B, AY);
  b.Fby_by = J.select(BY, BY);
  b.Fby_a = J.select(BY, A);
  b.Fay_ay = J.select(AY, AY);
  b.Fay_b = J.select(AY, B);
  return b;
}

AugmentedBlocks augmented_jacobian_blocks(const FastSlowSystem& sys, const AffineChart& c, const IVector& z,
                                          const IVector& Y, double eps0) {
  TransformedJet t = transformed_jet(sys, c, z, Y, eps0);
  return split_blocks(augmented_jacobian(t, sys.l()), c.n_u, c.n_s);
}

RateConstants compute_rates(const AugmentedBlocks& b, double M) {
  if (!(M > 1.0)) throw ConfigError("cone slope M must exceed 1");
  if (b.Fa_a.rows() == 0 || b.Fb_b.rows() == 0)
    throw HyperbolicityViolated("rates need both unstable and stable directions");
  const double inv = (Interval(1.0) / Interval(M)).hi();
  RateConstants r;
  r.M = M;
  r.mu_s1 = upper_rate(b.Fb_b, inv, b.Fb_ay);
  r.mu_s2 = upper_rate(b.Fb_b, M, b.Fay_b);
  r.xi_u1 = lower_rate(b.Fa_a, inv, b.Fa_by);
  r.xi_u2 = lower_rate(b.Fa_a, M, b.Fa_by);
  r.mu_ss1 = upper_rate(b.Fby_by, M, b.Fby_a);
  r.mu_ss2 = upper_rate(b.Fby_by, inv, b.Fa_by);
  r.xi_su1 = lower_rate(b.Fay_ay, M, b.Fay_b);
  r.xi_su2 = lower_rate(b.Fay_ay, inv, b.Fb_ay);
  return r;
}

RateOrder rate_order(const RateConstants& r) {
  RateOrder o;
  o.k_su_ratio = r.mu_s2 / r.xi_su1;
  o.k_ss_ratio = r.mu_ss2 / r.xi_su1;

  auto floor_order = [](double ratio, double num, double den) {
    // (j+1) den > num for every j when den >= 0 > num.
    if (den >= 0.0) return num < 0.0 ? kMaxOrder : -1;
    if (!std::isfinite(ratio)) return -1;
    return static_cast<int>(std::min<double>(kMaxOrder, std::floor(ratio) - 1));
  };
  o.k_floor = std::min(floor_order(o.k_su_ratio, r.mu_s2, r.xi_su1), floor_order(o.k_ss_ratio, r.mu_ss2, r.xi_su1));

  const bool hyperbolic = r.mu_s1 < 0.0 && 0.0 < r.xi_u1;
  const bool gap = r.mu_ss1 < r.xi_u1 && r.mu_s1 < r.xi_su1;
  if (!hyperbolic || !gap) return o;
  o.status = RateStatus::Ok;
  o.k = 0;
  const bool order_one = r.mu_s1 < r.xi_su2 && r.mu_ss2 < r.xi_u1;
  if (!order_one) return o;
  for (int j = 1; j <= kMaxOrder; ++j) {
    const Interval jj(j + 1.0);
    if (!((jj * Interval(r.mu_ss1)).hi() < r.xi_u2 && r.mu_s2 < (jj * Interval(r.xi_su1)).lo())) break;
    o.k = j;
  }
  return o;
}

ConeCertificate cone_check(const RateConstants& r, ConeKind kind) {
  ConeCertificate c;
  c.kind = kind;
  c.M = r.M;
  if (kind == ConeKind::Unstable) {
    c.margin_graph = r.xi_u1;
    c.margin_cone = (Interval(r.xi_u1) - Interval(r.mu_ss1)).lo();
  } else {
    c.margin_graph = -r.mu_s1;
    c.margin_cone = (Interval(r.xi_su1) - Interval(r.mu_s1)).lo();
  }
  c.holds = c.margin_graph > 0.0 && c.margin_cone > 0.0;
  return c;
}

const char* to_string(ConeKind k) { return k == ConeKind::Unstable ? "unstable" : "stable"; }
const char* to_string(RateStatus s) { return s == RateStatus::Ok ? "ok" : "no_hyperbolicity"; }

}  // namespace fsv
