#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fsv/linalg.hpp"
#include "fsv/symexpr.hpp"

namespace fsv {

// Text description of x' = f(x,y,eps), y' = eps g(x,y,eps).
struct SystemSpec {
  std::vector<std::string> fast;
  std::vector<std::string> slow;
  std::string eps = "eps";
  std::vector<std::pair<std::string, Interval>> params;
  std::vector<std::string> f;
  std::vector<std::string> g;
};

// Interval enclosures of the fields and all first derivatives over a box.
struct FieldJet {
  IVector f, g;
  IMatrix fx, fy, gx, gy;
  IVector feps, geps;
};

class FastSlowSystem {
 public:
  explicit FastSlowSystem(SystemSpec spec);

  const SystemSpec& spec() const { return spec_; }
  std::size_t n() const { return spec_.fast.size(); }
  std::size_t l() const { return spec_.slow.size(); }

  IVector f(const IVector& x, const IVector& y, const Interval& eps) const;
  IVector g(const IVector& x, const IVector& y, const Interval& eps) const;
  IMatrix fx(const IVector& x, const IVector& y, const Interval& eps) const;
  FieldJet jet(const IVector& x, const IVector& y, const Interval& eps) const;

  // Floating evaluation with parameters at their midpoints.
  Vec f_point(const Vec& x, const Vec& y, double eps) const;
  Vec g_point(const Vec& x, const Vec& y, double eps) const;
  Mat fx_point(const Vec& x, const Vec& y, double eps) const;
  Mat fy_point(const Vec& x, const Vec& y, double eps) const;

  const std::vector<Expr>& f_exprs() const { return f_; }
  const std::vector<Expr>& g_exprs() const { return g_; }

 private:
  std::vector<Interval> slots(const IVector& x, const IVector& y, const Interval& eps) const;
  std::vector<double> point_slots(const Vec& x, const Vec& y, double eps) const;

  SystemSpec spec_;
  std::vector<std::string> symbols_;
  std::vector<Expr> f_, g_;
  std::vector<Program> pf_, pg_, pfeps_, pgeps_;
  std::vector<std::vector<Program>> pfx_, pfy_, pgx_, pgy_;
};

}  // namespace fsv
