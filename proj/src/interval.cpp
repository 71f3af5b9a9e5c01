#include "fsv/interval.hpp"

#include <cassert>
#include <ostream>

namespace fsv {

namespace {

// libm transcendental functions are not correctly rounded; two steps cover
// the documented glibc error bounds.
Interval widen2(double lo, double hi) { return Interval(down(down(lo)), up(up(hi))); }

constexpr double kPiLo = 3.141592653589793;  // nearest double, below pi

// x^k for x >= 0 with directed rounding simulated by stepping.
double pow_down(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = std::fmax(0.0, down(r * x));
  return r;
}
double pow_up(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = up(r * x);
  return r;
}

// Does some point c0 + k*period (k integer) possibly lie in [lo, hi]?
// c0 and period are multiples of pi given as rational coefficients.
bool hits_critical(const Interval& a, double c0_over_pi, double period_over_pi) {
  Interval pi = pi_interval();
  double klo = std::floor((a.lo() / kPiLo - c0_over_pi) / period_over_pi) - 1.0;
  double khi = std::ceil((a.hi() / kPiLo - c0_over_pi) / period_over_pi) + 1.0;
  for (double k = klo; k <= khi; k += 1.0) {
    Interval x = pi * (Interval(c0_over_pi) + Interval(k) * Interval(period_over_pi));
    if (x.hi() >= a.lo() && x.lo() <= a.hi()) return true;
  }
  return false;
}

Interval clamp_unit(double lo, double hi) { return Interval(std::fmax(-1.0, lo), std::fmin(1.0, hi)); }

}  // namespace

Interval pi_interval() { return Interval(kPiLo, up(kPiLo)); }

Interval sqr(const Interval& a) {
  if (thin_zero(a)) return a;
  if (a.lo() >= 0.0) return Interval(std::fmax(0.0, down(a.lo() * a.lo())), up(a.hi() * a.hi()));
  if (a.hi() <= 0.0) return Interval(std::fmax(0.0, down(a.hi() * a.hi())), up(a.lo() * a.lo()));
  double m = a.mag();
  return Interval(0.0, up(m * m));
}

Interval pow_int(const Interval& a, int k) {
  if (k < 0) throw DomainError("negative integer power");
  if (k == 0) return Interval(1.0);
  if (k == 1) return a;
  if (k % 2 == 0) {
    if (a.lo() >= 0.0) return Interval(pow_down(a.lo(), k), pow_up(a.hi(), k));
    if (a.hi() <= 0.0) return Interval(pow_down(-a.hi(), k), pow_up(-a.lo(), k));
    return Interval(0.0, pow_up(a.mag(), k));
  }
  double lo = a.lo() >= 0.0 ? pow_down(a.lo(), k) : -pow_up(-a.lo(), k);
  double hi = a.hi() >= 0.0 ? pow_up(a.hi(), k) : -pow_down(-a.hi(), k);
  return Interval(lo, hi);
}

Interval sqrt(const Interval& a) {
  if (a.lo() < 0.0) throw DomainError("sqrt of an interval with negative lower bound");
  return Interval(std::fmax(0.0, down(std::sqrt(a.lo()))), up(std::sqrt(a.hi())));
}

Interval exp(const Interval& a) {
  Interval r = widen2(std::exp(a.lo()), std::exp(a.hi()));
  return Interval(std::fmax(0.0, r.lo()), r.hi());
}

Interval sin(const Interval& a) {
  if (a.hi() - a.lo() >= 2.0 * kPiLo) return Interval(-1.0, 1.0);
  double s1 = std::sin(a.lo()), s2 = std::sin(a.hi());
  Interval r = widen2(std::fmin(s1, s2), std::fmax(s1, s2));
  double lo = r.lo(), hi = r.hi();
  if (hits_critical(a, 0.5, 2.0)) hi = 1.0;
  if (hits_critical(a, -0.5, 2.0)) lo = -1.0;
  return clamp_unit(lo, hi);
}

Interval cos(const Interval& a) {
  if (a.hi() - a.lo() >= 2.0 * kPiLo) return Interval(-1.0, 1.0);
  double c1 = std::cos(a.lo()), c2 = std::cos(a.hi());
  Interval r = widen2(std::fmin(c1, c2), std::fmax(c1, c2));
  double lo = r.lo(), hi = r.hi();
  if (hits_critical(a, 0.0, 2.0)) hi = 1.0;
  if (hits_critical(a, 1.0, 2.0)) lo = -1.0;
  return clamp_unit(lo, hi);
}

Interval abs(const Interval& a) {
  if (a.lo() >= 0.0) return a;
  if (a.hi() <= 0.0) return -a;
  return Interval(0.0, a.mag());
}

std::ostream& operator<<(std::ostream& os, const Interval& a) {
  auto prec = os.precision(17);
  os << '[' << a.lo() << ", " << a.hi() << ']';
  os.precision(prec);
  return os;
}

std::vector<double> IVector::mid() const {
  std::vector<double> m(v_.size());
  for (std::size_t i = 0; i < v_.size(); ++i) m[i] = v_[i].mid();
  return m;
}

double IVector::max_rad() const {
  double r = 0.0;
  for (const auto& x : v_) r = std::fmax(r, x.rad());
  return r;
}

bool IVector::subset_of(const IVector& b) const {
  for (std::size_t i = 0; i < v_.size(); ++i)
    if (!v_[i].subset_of(b[i])) return false;
  return true;
}

bool IVector::subset_interior(const IVector& b) const {
  for (std::size_t i = 0; i < v_.size(); ++i)
    if (!v_[i].subset_interior(b[i])) return false;
  return true;
}

IVector operator+(const IVector& a, const IVector& b) {
  assert(a.size() == b.size());
  IVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

IVector operator-(const IVector& a, const IVector& b) {
  assert(a.size() == b.size());
  IVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

IVector operator-(const IVector& a) {
  IVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

IVector operator*(const Interval& s, const IVector& a) {
  IVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

IVector hull(const IVector& a, const IVector& b) {
  IVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = hull(a[i], b[i]);
  return r;
}

std::optional<IVector> intersect(const IVector& a, const IVector& b) {
  IVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto x = intersect(a[i], b[i]);
    if (!x) return std::nullopt;
    r[i] = *x;
  }
  return r;
}

Interval dot(const IVector& a, const IVector& b) {
  Interval s(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Interval norm2_sq(const IVector& a) {
  Interval s(0.0);
  for (const auto& x : a) s += sqr(x);
  return s;
}

IMatrix::IMatrix(std::initializer_list<std::initializer_list<Interval>> rows) {
  rows_ = rows.size();
  cols_ = rows.size() ? rows.begin()->size() : 0;
  a_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw IntervalError("ragged matrix initializer");
    for (const auto& x : r) a_.push_back(x);
  }
}

IMatrix IMatrix::identity(std::size_t n) {
  IMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = Interval(1.0);
  return m;
}

IMatrix IMatrix::transpose() const {
  IMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

IMatrix IMatrix::select(const std::vector<int>& rs, const std::vector<int>& cs) const {
  IMatrix m(rs.size(), cs.size());
  for (std::size_t i = 0; i < rs.size(); ++i)
    for (std::size_t j = 0; j < cs.size(); ++j) m(i, j) = (*this)(rs[i], cs[j]);
  return m;
}

IVector IMatrix::col(std::size_t j) const {
  IVector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void IMatrix::set_col(std::size_t j, const IVector& v) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

IVector IMatrix::row(std::size_t i) const {
  IVector v(cols_);
  for (std::size_t j = 0; j < cols_; ++j) v[j] = (*this)(i, j);
  return v;
}

std::vector<double> IMatrix::mid_data() const {
  std::vector<double> m(a_.size());
  for (std::size_t k = 0; k < a_.size(); ++k) m[k] = a_[k].mid();
  return m;
}

double IMatrix::max_rad() const {
  double r = 0.0;
  for (const auto& x : a_) r = std::fmax(r, x.rad());
  return r;
}

bool IMatrix::subset_of(const IMatrix& b) const {
  for (std::size_t k = 0; k < a_.size(); ++k)
    if (!a_[k].subset_of(b.a_[k])) return false;
  return true;
}

IMatrix operator+(const IMatrix& a, const IMatrix& b) {
  IMatrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + b(i, j);
  return r;
}

IMatrix operator-(const IMatrix& a, const IMatrix& b) {
  IMatrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) - b(i, j);
  return r;
}

IMatrix operator*(const IMatrix& a, const IMatrix& b) {
  assert(a.cols() == b.rows());
  IMatrix r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Interval s(0.0);
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

IMatrix operator*(const Interval& s, const IMatrix& a) {
  IMatrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = s * a(i, j);
  return r;
}

IVector operator*(const IMatrix& a, const IVector& x) {
  assert(a.cols() == x.size());
  IVector r(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Interval s(0.0);
    for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * x[k];
    r[i] = s;
  }
  return r;
}

IMatrix hull(const IMatrix& a, const IMatrix& b) {
  IMatrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = hull(a(i, j), b(i, j));
  return r;
}

}  // namespace fsv
