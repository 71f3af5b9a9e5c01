#pragma once

#include <string>
#include <vector>

#include "fsv/eigenpair.hpp"
#include "fsv/system.hpp"

namespace fsv {

// One eigendirection of the chart; a complex pair occupies coordinates
// (coord, coord+1) with P columns (Re u, Im u).
struct Direction {
  bool unstable = true;
  bool pair = false;
  int coord = 0;
};

// (x, y) = T(z, w) = (P z + x_bar + slope w, w + y_bar).
struct AffineChart {
  Vec x_bar;
  Vec y_bar;
  Mat slope;
  IMatrix P;
  IMatrix P_inv;
  std::vector<Direction> dirs;
  int n_u = 0;
  int n_s = 0;
  // Block-diagonal (real Jordan form) matrix used to split z' = Lambda z + F.
  Mat Lambda;
  // Per coordinate: enclosure of the real part of its eigenvalue, and the
  // imaginary part (pairs only; stored on both coordinates of the pair).
  std::vector<Interval> lambda_re;
  std::vector<Interval> lambda_im;
  // Floating eigenpairs matching dirs (pairs carry the Im > 0 member).
  std::vector<EigenSeed> seeds;

  Mat P_mid() const { return mid(P); }
};

// Chart at a numerical equilibrium of the layer problem. Unstable
// directions come first, each group sorted by decreasing real part. With a
// reference chart of the same type, directions are matched to the reference
// eigenvalues (nearest in C) and eigenvectors aligned in sign or phase.
AffineChart build_chart(const FastSlowSystem& sys, const Vec& x_bar, const Vec& y_bar,
                        const AffineChart* ref = nullptr);

// Replace P by the enclosure whose columns are the eigenvector enclosures and
// Lambda / lambda bounds by the validated eigenvalue enclosures.
AffineChart chart_from_family(const AffineChart& base, const std::vector<EigenPairEnclosure>& family);

// Newton solve of f(x, y, 0) = 0 from x0.
Vec newton_equilibrium(const FastSlowSystem& sys, const Vec& x0, const Vec& y, int max_iter = 50);

struct BlockBox {
  IVector z;  // chart coordinates; pair coordinates hold the disk's bounding square
  IVector Y;  // slow box
  double eta_u = 0.0;
  double eta_s = 0.0;
  std::vector<double> radius;  // disk radius on pair coordinates, 0 elsewhere

  IVector a_ranges(const AffineChart& c) const;
  IVector b_ranges(const AffineChart& c) const;
};

// Enclosures of the transformed field and its derivatives over a box, in the
// mean-value form z' in c + Mz (z - zc) + Mw w.
struct TransformedJet {
  Vec zc;
  IVector c;        // z' at (zc, w = 0) for all eps
  IMatrix Mz;       // dz'/dz
  IMatrix Mw;       // dz'/dw
  IVector z_eta;    // dz'/d(eta), eps = eps0 * eta
  IMatrix gz;       // dw'/dz
  IMatrix gw;       // dw'/dw
  IVector w_eta;    // dw'/d(eta)
};

TransformedJet transformed_jet(const FastSlowSystem& sys, const AffineChart& c, const IVector& z, const IVector& Y,
                               double eps0);

// Image T(z, w) of a chart box in phase space (fast variables only).
IVector chart_image(const AffineChart& c, const IVector& z, const IVector& Y);

// Enclosure of F = z' - Lambda z over box x [0, eps0].
IVector residual_bounds(const FastSlowSystem& sys, const AffineChart& c, const IVector& z, const IVector& Y,
                        double eps0);

// Box from residual bounds; lambda holds the per-coordinate real-part
// enclosures. Throws HyperbolicityViolated.
BlockBox derive_box(const AffineChart& c, const IVector& delta, const std::vector<Interval>& lambda, double eta_u,
                    double eta_s, const IVector& Y);

struct FaceCheck {
  int coord = 0;
  int side = 0;  // +1 upper face, -1 lower face, 0 radial (pairs)
  bool exit = false;
  Interval derivative;  // enclosure of the normal derivative (radial: margin)
  bool ok = false;
};

struct FastSaddleBlock {
  AffineChart chart;
  BlockBox box;
  IVector delta;
  std::vector<Interval> lambda_bounds;
  IVector E;  // box over which delta was computed
  bool self_consistent = false;
  bool isolation_certified = false;
  std::vector<FaceCheck> faces;
  std::string diagnostic;

  bool certified() const { return self_consistent && isolation_certified; }
};

FastSaddleBlock verify_block(const FastSlowSystem& sys, const AffineChart& c, const BlockBox& box, const IVector& delta,
                             const std::vector<Interval>& lambda, const IVector& E, double eps0);

struct BlockOptions {
  double eta_u = 0.0;
  double eta_s = 0.0;
  // Relative padding of derived ranges plus an absolute floor; gives the strict
  // face inequalities room when eta = 0.
  double pad_rel = 0.02;
  double pad_abs = 1e-12;
  double inflate = 1.5;
  int max_iter = 5;
};

// Self-consistent construction: derive the box from residual bounds over E,
// enlarge E until it contains the derived box, then verify the faces.
FastSaddleBlock construct_block(const FastSlowSystem& sys, const AffineChart& c, const IVector& Y, double eps0,
                                const std::vector<Interval>& lambda, const BlockOptions& opts);

}  // namespace fsv
