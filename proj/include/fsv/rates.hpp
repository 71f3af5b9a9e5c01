#pragma once

#include "fsv/block.hpp"

namespace fsv {

// Jacobian blocks of the augmented field in the order (a, b, w, eta), where
// the center variable y collects (w, eta) and eta' = 0.
struct AugmentedBlocks {
  IMatrix Fa_a, Fa_by;
  IMatrix Fb_b, Fb_ay;
  IMatrix Fby_by, Fby_a;
  IMatrix Fay_ay, Fay_b;
};

// Full augmented Jacobian over box x [0, eps0].
IMatrix augmented_jacobian(const TransformedJet& t, std::size_t l);
AugmentedBlocks split_blocks(const IMatrix& J, int n_u, int n_s);
AugmentedBlocks augmented_jacobian_blocks(const FastSlowSystem& sys, const AffineChart& c, const IVector& z,
                                          const IVector& Y, double eps0);

// mu are upper bounds, xi lower bounds.
struct RateConstants {
  double M = 10.0;
  double mu_s1 = 0, mu_s2 = 0, xi_u1 = 0, xi_u2 = 0;
  double mu_ss1 = 0, mu_ss2 = 0, xi_su1 = 0, xi_su2 = 0;
};

RateConstants compute_rates(const AugmentedBlocks& b, double M);

enum class RateStatus { Ok, NoHyperbolicity };

constexpr int kMaxOrder = 64;

struct RateOrder {
  RateStatus status = RateStatus::NoHyperbolicity;
  int k = -1;  // from scanning the inequalities; capped at kMaxOrder
  // Floor formulas reported alongside the scan.
  double k_su_ratio = 0.0;  // mu_s2 / xi_su1
  double k_ss_ratio = 0.0;  // mu_ss2 / xi_su1
  int k_floor = -1;         // min(floor(ratios)) - 1
};

RateOrder rate_order(const RateConstants& r);

enum class ConeKind { Unstable, Stable };

struct ConeCertificate {
  ConeKind kind = ConeKind::Unstable;
  double M = 0.0;
  bool holds = false;
  double margin_graph = 0.0;  // xi_u1 (unstable) or -mu_s1 (stable)
  double margin_cone = 0.0;   // xi_u1 - mu_ss1 or xi_su1 - mu_s1
};

// The complementary rate in each cone inequality is taken to be the upper
// rate of the other block (mu_ss1 for unstable, mu_s1 for stable).
ConeCertificate cone_check(const RateConstants& r, ConeKind kind);

const char* to_string(ConeKind k);
const char* to_string(RateStatus s);

}  // namespace fsv
