#include "fsv/linalg.hpp"

#include <cmath>

namespace fsv {

IMatrix to_imatrix(const Mat& a) {
  IMatrix r(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) r(i, j) = Interval(a(i, j));
  return r;
}

IVector to_ivector(const Vec& v) {
  IVector r(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) r[i] = Interval(v(i));
  return r;
}

Mat mid(const IMatrix& a) {
  Mat m(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j).mid();
  return m;
}

Vec mid(const IVector& v) {
  Vec m(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) m(i) = v[i].mid();
  return m;
}

Mat mag(const IMatrix& a) {
  Mat m(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j).mag();
  return m;
}

Mat approx_inverse(const Mat& a) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw NumericallySingular("approx_inverse: matrix is not square");
  double scale = n ? a.cwiseAbs().maxCoeff() : 0.0;
  if (!(scale > 0.0) || !std::isfinite(scale)) throw NumericallySingular("approx_inverse: zero or non-finite matrix");
  Mat lu = a;
  std::vector<Eigen::Index> perm(n);
  for (Eigen::Index i = 0; i < n; ++i) perm[i] = i;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index p = k;
    for (Eigen::Index i = k + 1; i < n; ++i)
      if (std::fabs(lu(i, k)) > std::fabs(lu(p, k))) p = i;
    if (std::fabs(lu(p, k)) <= 1e-14 * scale) throw NumericallySingular("approx_inverse: pivot below 1e-14");
    if (p != k) {
      lu.row(p).swap(lu.row(k));
      std::swap(perm[p], perm[k]);
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      lu(i, k) /= lu(k, k);
      for (Eigen::Index j = k + 1; j < n; ++j) lu(i, j) -= lu(i, k) * lu(k, j);
    }
  }
  Mat inv(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    Vec x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double s = perm[i] == c ? 1.0 : 0.0;
      for (Eigen::Index j = 0; j < i; ++j) s -= lu(i, j) * x(j);
      x(i) = s;
    }
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      double s = x(i);
      for (Eigen::Index j = i + 1; j < n; ++j) s -= lu(i, j) * x(j);
      x(i) = s / lu(i, i);
    }
    inv.col(c) = x;
  }
  return inv;
}

namespace {

// Upper bound of the infinity norm.
double norm_inf_upper(const IMatrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Interval s(0.0);
    for (std::size_t j = 0; j < a.cols(); ++j) s += Interval(a(i, j).mag());
    best = std::fmax(best, s.hi());
  }
  return best;
}

}  // namespace

IMatrix inverse_enclosure(const IMatrix& p, const Mat& c) {
  const std::size_t n = p.rows();
  IMatrix ci = to_imatrix(c);
  IMatrix r = IMatrix::identity(n) - ci * p;
  double rho = norm_inf_upper(r);
  if (!(rho < 1.0)) throw NumericallySingular("inverse_enclosure: ||I - C P|| >= 1");
  // P^-1 = C + R C + R (I - R)^-1 R C, the last term bounded entrywise by
  // rho ||R C|| / (1 - rho).
  IMatrix rc = r * ci;
  double e = (Interval(rho) * Interval(norm_inf_upper(rc)) / (Interval(1.0) - Interval(rho))).hi();
  IMatrix out = ci + rc;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = out(i, j) + Interval(-e, e);
  return out;
}

IMatrix inverse_enclosure(const IMatrix& p) { return inverse_enclosure(p, approx_inverse(mid(p))); }

GershgorinResult gershgorin(const IMatrix& a) {
  GershgorinResult res;
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i) {
    Interval r(0.0);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) r += Interval(a(i, j).mag());
    res.disks.push_back({a(i, i), Interval(0.0), Interval(0.0, r.hi())});
  }
  res.disjoint = true;
  for (std::size_t i = 0; i < n && res.disjoint; ++i) {
    const auto& di = res.disks[i];
    Interval pi = Interval(di.center_re.lo()) - Interval(di.radius.hi());
    Interval qi = Interval(di.center_re.hi()) + Interval(di.radius.hi());
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& dj = res.disks[j];
      Interval pj = Interval(dj.center_re.lo()) - Interval(dj.radius.hi());
      Interval qj = Interval(dj.center_re.hi()) + Interval(dj.radius.hi());
      bool separated = qi.hi() < pj.lo() || qj.hi() < pi.lo();
      if (!separated) {
        res.disjoint = false;
        break;
      }
    }
  }
  return res;
}

GershgorinResult gershgorin(const IMatrix& re, const IMatrix& im) {
  GershgorinResult res;
  const std::size_t n = re.rows();
  for (std::size_t i = 0; i < n; ++i) {
    Interval r(0.0);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) r += Interval(sqrt_up((sqr(Interval(re(i, j).mag())) + sqr(Interval(im(i, j).mag()))).hi()));
    res.disks.push_back({re(i, i), im(i, i), Interval(0.0, r.hi())});
  }
  res.disjoint = true;
  for (std::size_t i = 0; i < n && res.disjoint; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& a = res.disks[i];
      const auto& b = res.disks[j];
      double dx = (a.center_re - b.center_re).mig();
      double dy = (a.center_im - b.center_im).mig();
      Interval dist2 = sqr(Interval(dx)) + sqr(Interval(dy));
      Interval rsum = Interval(a.radius.hi()) + Interval(b.radius.hi());
      if (!(dist2.lo() > sqr(rsum).hi())) {
        res.disjoint = false;
        break;
      }
    }
  }
  return res;
}

LogNormBounds log_norm_bounds(const IMatrix& a) {
  const std::size_t n = a.rows();
  if (n == 0 || a.cols() != n) throw DomainError("log_norm_bounds: matrix must be square and non-empty");
  LogNormBounds b;
  b.l_upper = -std::numeric_limits<double>::infinity();
  b.ml_lower = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    Interval r(0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      Interval s = (a(i, j) + a(j, i)) * Interval(0.5);
      r += Interval(s.mag());
    }
    const Interval& d = a(i, i);
    b.l_upper = std::fmax(b.l_upper, (Interval(d.hi()) + Interval(r.hi())).hi());
    b.ml_lower = std::fmin(b.ml_lower, (Interval(d.lo()) - Interval(r.hi())).lo());
  }
  return b;
}

double op_norm_upper(const IMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  double n_inf = norm_inf_upper(a);
  double n_one = norm_inf_upper(a.transpose());
  double holder = sqrt_up((Interval(n_one) * Interval(n_inf)).hi());
  Interval fro(0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) fro += sqr(Interval(a(i, j).mag()));
  return std::fmin(holder, sqrt_up(fro.hi()));
}

}  // namespace fsv
