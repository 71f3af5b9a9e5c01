#include "fsv/system.hpp"

namespace fsv {

FastSlowSystem::FastSlowSystem(SystemSpec spec) : spec_(std::move(spec)) {
  if (spec_.f.size() != spec_.fast.size()) throw ConfigError("number of fast equations differs from number of fast variables");
  if (spec_.g.size() != spec_.slow.size()) throw ConfigError("number of slow equations differs from number of slow variables");
  if (spec_.fast.empty()) throw ConfigError("system has no fast variables");
  for (const auto& v : spec_.fast) symbols_.push_back(v);
  for (const auto& v : spec_.slow) symbols_.push_back(v);
  symbols_.push_back(spec_.eps);
  for (const auto& [name, value] : spec_.params) symbols_.push_back(name);

  for (const auto& s : spec_.f) f_.push_back(parse(s));
  for (const auto& s : spec_.g) g_.push_back(parse(s));

  auto compile = [&](const Expr& e) { return Program(e, symbols_); };
  auto grad = [&](const Expr& e, const std::vector<std::string>& vars) {
    std::vector<Program> row;
    for (const auto& v : vars) row.push_back(compile(diff(e, v)));
    return row;
  };
  for (const auto& e : f_) {
    pf_.push_back(compile(e));
    pfeps_.push_back(compile(diff(e, spec_.eps)));
    pfx_.push_back(grad(e, spec_.fast));
    pfy_.push_back(grad(e, spec_.slow));
  }
  for (const auto& e : g_) {
    pg_.push_back(compile(e));
    pgeps_.push_back(compile(diff(e, spec_.eps)));
    pgx_.push_back(grad(e, spec_.fast));
    pgy_.push_back(grad(e, spec_.slow));
  }
}

std::vector<Interval> FastSlowSystem::slots(const IVector& x, const IVector& y, const Interval& eps) const {
  std::vector<Interval> s;
  s.reserve(symbols_.size());
  for (const auto& v : x) s.push_back(v);
  for (const auto& v : y) s.push_back(v);
  s.push_back(eps);
  for (const auto& p : spec_.params) s.push_back(p.second);
  return s;
}

std::vector<double> FastSlowSystem::point_slots(const Vec& x, const Vec& y, double eps) const {
  std::vector<double> s;
  s.reserve(symbols_.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) s.push_back(x(i));
  for (Eigen::Index i = 0; i < y.size(); ++i) s.push_back(y(i));
  s.push_back(eps);
  for (const auto& p : spec_.params) s.push_back(p.second.mid());
  return s;
}

namespace {

IVector eval_vec(const std::vector<Program>& ps, const Interval* s) {
  IVector r(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) r[i] = ps[i].eval(s);
  return r;
}

IMatrix eval_mat(const std::vector<std::vector<Program>>& ps, std::size_t cols, const Interval* s) {
  IMatrix r(ps.size(), cols);
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) r(i, j) = ps[i][j].eval(s);
  return r;
}

Mat eval_mat_point(const std::vector<std::vector<Program>>& ps, std::size_t cols, const double* s) {
  Mat r(ps.size(), cols);
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) r(i, j) = ps[i][j].eval(s);
  return r;
}

}  // namespace

IVector FastSlowSystem::f(const IVector& x, const IVector& y, const Interval& eps) const {
  auto s = slots(x, y, eps);
  return eval_vec(pf_, s.data());
}

IVector FastSlowSystem::g(const IVector& x, const IVector& y, const Interval& eps) const {
  auto s = slots(x, y, eps);
  return eval_vec(pg_, s.data());
}

IMatrix FastSlowSystem::fx(const IVector& x, const IVector& y, const Interval& eps) const {
  auto s = slots(x, y, eps);
  return eval_mat(pfx_, n(), s.data());
}

FieldJet FastSlowSystem::jet(const IVector& x, const IVector& y, const Interval& eps) const {
  auto s = slots(x, y, eps);
  FieldJet j;
  j.f = eval_vec(pf_, s.data());
  j.g = eval_vec(pg_, s.data());
  j.fx = eval_mat(pfx_, n(), s.data());
  j.fy = eval_mat(pfy_, l(), s.data());
  j.gx = eval_mat(pgx_, n(), s.data());
  j.gy = eval_mat(pgy_, l(), s.data());
  j.feps = eval_vec(pfeps_, s.data());
  j.geps = eval_vec(pgeps_, s.data());
  return j;
}

Vec FastSlowSystem::f_point(const Vec& x, const Vec& y, double eps) const {
  auto s = point_slots(x, y, eps);
  Vec r(pf_.size());
  for (std::size_t i = 0; i < pf_.size(); ++i) r(i) = pf_[i].eval(s.data());
  return r;
}

Vec FastSlowSystem::g_point(const Vec& x, const Vec& y, double eps) const {
  auto s = point_slots(x, y, eps);
  Vec r(pg_.size());
  for (std::size_t i = 0; i < pg_.size(); ++i) r(i) = pg_[i].eval(s.data());
  return r;
}

Mat FastSlowSystem::fx_point(const Vec& x, const Vec& y, double eps) const {
  auto s = point_slots(x, y, eps);
  return eval_mat_point(pfx_, n(), s.data());
}

Mat FastSlowSystem::fy_point(const Vec& x, const Vec& y, double eps) const {
  auto s = point_slots(x, y, eps);
  return eval_mat_point(pfy_, l(), s.data());
}

}  // namespace fsv
