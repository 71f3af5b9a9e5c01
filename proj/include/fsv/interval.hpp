#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "fsv/errors.hpp"

namespace fsv {

// Outward rounding without touching the FPU rounding mode: every primitive is
// computed in round-to-nearest and its endpoints are pushed one ulp outward.
inline double down(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }
inline double up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }
// Upper bound of sqrt(x) for x >= 0 known only through an upper bound; IEEE
// sqrt is correctly rounded, so one step suffices.
inline double sqrt_up(double x) { return x <= 0.0 ? 0.0 : up(std::sqrt(x)); }

class Interval {
 public:
  constexpr Interval() = default;
  Interval(double v) : lo_(v), hi_(v) { check(); }  // NOLINT: implicit thin interval
  Interval(double lo, double hi) : lo_(lo), hi_(hi) { check(); }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double mid() const {
    double m = 0.5 * lo_ + 0.5 * hi_;
    return m < lo_ ? lo_ : (m > hi_ ? hi_ : m);
  }
  // Upper bounds for the radius and width.
  double rad() const { return up(std::fmax(hi_ - mid(), mid() - lo_)); }
  double width() const { return up(hi_ - lo_); }
  double mag() const { return std::fmax(std::fabs(lo_), std::fabs(hi_)); }
  double mig() const {
    if (lo_ <= 0.0 && hi_ >= 0.0) return 0.0;
    return std::fmin(std::fabs(lo_), std::fabs(hi_));
  }
  bool is_thin() const { return lo_ == hi_; }
  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool contains_zero() const { return lo_ <= 0.0 && 0.0 <= hi_; }
  bool subset_of(const Interval& b) const { return b.lo_ <= lo_ && hi_ <= b.hi_; }
  // True iff this lies in the interior of b.
  bool subset_interior(const Interval& b) const { return b.lo_ < lo_ && hi_ < b.hi_; }

  // Construct from endpoints already known to be ordered, widening outward.
  static Interval outward(double lo, double hi) { return Interval(down(lo), up(hi)); }
  static Interval hull(const Interval& a, const Interval& b) {
    return Interval(std::fmin(a.lo_, b.lo_), std::fmax(a.hi_, b.hi_));
  }

 private:
  void check() const {
    if (std::isnan(lo_) || std::isnan(hi_)) throw IntervalError("interval bound is NaN");
    if (std::isinf(lo_) || std::isinf(hi_)) throw DomainError("interval bound is infinite (overflow)");
    if (lo_ > hi_) throw IntervalError("interval with lo > hi");
  }

  double lo_ = 0.0;
  double hi_ = 0.0;
};

inline Interval hull(const Interval& a, const Interval& b) { return Interval::hull(a, b); }

// Empty intersections are reported as std::nullopt.
inline std::optional<Interval> intersect(const Interval& a, const Interval& b) {
  double lo = std::fmax(a.lo(), b.lo());
  double hi = std::fmin(a.hi(), b.hi());
  if (lo > hi) return std::nullopt;
  return Interval(lo, hi);
}

inline bool subset_interior(const Interval& a, const Interval& b) { return a.subset_interior(b); }

inline Interval operator-(const Interval& a) { return Interval(-a.hi(), -a.lo()); }

// Operations with a thin zero operand are exact and skip the widening.
inline bool thin_zero(const Interval& a) { return a.is_thin() && a.lo() == 0.0; }

inline Interval operator+(const Interval& a, const Interval& b) {
  if (thin_zero(a)) return b;
  if (thin_zero(b)) return a;
  return Interval::outward(a.lo() + b.lo(), a.hi() + b.hi());
}

inline Interval operator-(const Interval& a, const Interval& b) {
  if (thin_zero(b)) return a;
  if (thin_zero(a)) return -b;
  return Interval::outward(a.lo() - b.hi(), a.hi() - b.lo());
}

inline Interval operator*(const Interval& a, const Interval& b) {
  if (thin_zero(a) || thin_zero(b)) return Interval(0.0);
  double p1 = a.lo() * b.lo(), p2 = a.lo() * b.hi(), p3 = a.hi() * b.lo(), p4 = a.hi() * b.hi();
  double lo = std::fmin(std::fmin(p1, p2), std::fmin(p3, p4));
  double hi = std::fmax(std::fmax(p1, p2), std::fmax(p3, p4));
  return Interval::outward(lo, hi);
}

inline Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains_zero()) throw DivisionByZeroInterval();
  double q1 = a.lo() / b.lo(), q2 = a.lo() / b.hi(), q3 = a.hi() / b.lo(), q4 = a.hi() / b.hi();
  double lo = std::fmin(std::fmin(q1, q2), std::fmin(q3, q4));
  double hi = std::fmax(std::fmax(q1, q2), std::fmax(q3, q4));
  return Interval::outward(lo, hi);
}

inline Interval& operator+=(Interval& a, const Interval& b) { return a = a + b; }
inline Interval& operator-=(Interval& a, const Interval& b) { return a = a - b; }
inline Interval& operator*=(Interval& a, const Interval& b) { return a = a * b; }
inline Interval& operator/=(Interval& a, const Interval& b) { return a = a / b; }

inline bool operator==(const Interval& a, const Interval& b) { return a.lo() == b.lo() && a.hi() == b.hi(); }
inline bool operator!=(const Interval& a, const Interval& b) { return !(a == b); }

Interval sqr(const Interval& a);
Interval pow_int(const Interval& a, int k);
Interval sqrt(const Interval& a);
Interval exp(const Interval& a);
Interval sin(const Interval& a);
Interval cos(const Interval& a);
Interval abs(const Interval& a);

// Rigorous enclosure of pi.
Interval pi_interval();

std::ostream& operator<<(std::ostream& os, const Interval& a);

class IVector {
 public:
  IVector() = default;
  explicit IVector(std::size_t n) : v_(n) {}
  IVector(std::size_t n, const Interval& x) : v_(n, x) {}
  IVector(std::initializer_list<Interval> xs) : v_(xs) {}
  explicit IVector(std::vector<Interval> xs) : v_(std::move(xs)) {}

  std::size_t size() const { return v_.size(); }
  Interval& operator[](std::size_t i) { return v_[i]; }
  const Interval& operator[](std::size_t i) const { return v_[i]; }
  auto begin() { return v_.begin(); }
  auto end() { return v_.end(); }
  auto begin() const { return v_.begin(); }
  auto end() const { return v_.end(); }
  const std::vector<Interval>& data() const { return v_; }

  std::vector<double> mid() const;
  double max_rad() const;
  bool subset_of(const IVector& b) const;
  bool subset_interior(const IVector& b) const;

 private:
  std::vector<Interval> v_;
};

IVector operator+(const IVector& a, const IVector& b);
IVector operator-(const IVector& a, const IVector& b);
IVector operator-(const IVector& a);
IVector operator*(const Interval& s, const IVector& a);
IVector hull(const IVector& a, const IVector& b);
std::optional<IVector> intersect(const IVector& a, const IVector& b);
// Enclosure of the dot product.
Interval dot(const IVector& a, const IVector& b);
// Enclosure of the squared Euclidean norm.
Interval norm2_sq(const IVector& a);

class IMatrix {
 public:
  IMatrix() = default;
  IMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
  IMatrix(std::size_t rows, std::size_t cols, const Interval& x) : rows_(rows), cols_(cols), a_(rows * cols, x) {}
  IMatrix(std::initializer_list<std::initializer_list<Interval>> rows);

  static IMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Interval& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Interval& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  IMatrix transpose() const;
  // Submatrix from the given row and column index lists.
  IMatrix select(const std::vector<int>& rows, const std::vector<int>& cols) const;
  IVector col(std::size_t j) const;
  void set_col(std::size_t j, const IVector& v);
  IVector row(std::size_t i) const;

  std::vector<double> mid_data() const;
  double max_rad() const;
  bool subset_of(const IMatrix& b) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Interval> a_;
};

IMatrix operator+(const IMatrix& a, const IMatrix& b);
IMatrix operator-(const IMatrix& a, const IMatrix& b);
IMatrix operator*(const IMatrix& a, const IMatrix& b);
IMatrix operator*(const Interval& s, const IMatrix& a);
IVector operator*(const IMatrix& a, const IVector& x);
IMatrix hull(const IMatrix& a, const IMatrix& b);

}  // namespace fsv
