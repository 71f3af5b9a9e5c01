#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fsv/interval.hpp"

namespace fsv {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

IMatrix to_imatrix(const Mat& a);
IVector to_ivector(const Vec& v);
Mat mid(const IMatrix& a);
Vec mid(const IVector& v);
// Entrywise magnitude matrix.
Mat mag(const IMatrix& a);

// Floating inverse by LU with partial pivoting. Throws NumericallySingular
// when a pivot falls below 1e-14 relative to the largest entry.
Mat approx_inverse(const Mat& a);

// Rigorous enclosure of {P^-1 : P in p}, from an approximate inverse C of a
// member of p. Throws NumericallySingular unless ||I - C p|| < 1.
IMatrix inverse_enclosure(const IMatrix& p, const Mat& c);
IMatrix inverse_enclosure(const IMatrix& p);

struct GershgorinDisk {
  Interval center_re;
  Interval center_im;
  Interval radius;
};

struct GershgorinResult {
  std::vector<GershgorinDisk> disks;
  bool disjoint = false;
};

GershgorinResult gershgorin(const IMatrix& a);
// Complex matrix given by real and imaginary parts.
GershgorinResult gershgorin(const IMatrix& re, const IMatrix& im);

struct LogNormBounds {
  double l_upper = 0.0;
  double ml_lower = 0.0;
};

LogNormBounds log_norm_bounds(const IMatrix& a);
double op_norm_upper(const IMatrix& a);

}  // namespace fsv
