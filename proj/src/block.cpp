#include "fsv/block.hpp"

#include <algorithm>
#include <cmath>

namespace fsv {

namespace {

IVector thin_zero(std::size_t n) { return IVector(n, Interval(0.0)); }

IVector slow_offset(const AffineChart& c, const IVector& Y) {
  IVector W(Y.size());
  for (std::size_t i = 0; i < Y.size(); ++i) W[i] = Y[i] - Interval(c.y_bar(i));
  return W;
}

Interval eps_range(double eps0) { return Interval(0.0, eps0); }

// Upper bound of the Euclidean length of a 2-vector enclosure.
double mag2(const Interval& a, const Interval& b) {
  return sqrt_up((sqr(Interval(a.mag())) + sqr(Interval(b.mag()))).hi());
}

IVector inflate(const IVector& z, double factor) {
  IVector r(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    double m = z[i].mid();
    double h = z[i].rad() * factor;
    r[i] = Interval(m) + Interval(-h, h);
  }
  return r;
}

void pad_box(BlockBox& b, const AffineChart& c, double rel, double abs) {
  for (const auto& d : c.dirs) {
    if (d.pair) {
      double R = b.radius[d.coord];
      R = up(R + rel * R + abs);
      b.radius[d.coord] = b.radius[d.coord + 1] = R;
      b.z[d.coord] = b.z[d.coord + 1] = Interval(-R, R);
    } else {
      Interval& z = b.z[d.coord];
      double p = up(rel * z.rad() + abs);
      z = z + Interval(-p, p);
    }
  }
}

}  // namespace

IVector BlockBox::a_ranges(const AffineChart& c) const {
  IVector r(c.n_u);
  for (int i = 0; i < c.n_u; ++i) r[i] = z[i];
  return r;
}

IVector BlockBox::b_ranges(const AffineChart& c) const {
  IVector r(c.n_s);
  for (int i = 0; i < c.n_s; ++i) r[i] = z[c.n_u + i];
  return r;
}

Vec newton_equilibrium(const FastSlowSystem& sys, const Vec& x0, const Vec& y, int max_iter) {
  Vec x = x0;
  for (int it = 0; it < max_iter; ++it) {
    Vec fx = sys.f_point(x, y, 0.0);
    Mat J = sys.fx_point(x, y, 0.0);
    Vec dx = approx_inverse(J) * (-fx);
    x += dx;
    if (!x.allFinite()) throw NumericallySingular("Newton iteration diverged");
    if (dx.lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + x.lpNorm<Eigen::Infinity>())) break;
  }
  return x;
}

namespace {

// Greedy nearest-eigenvalue matching of items onto the reference order,
// within the unstable and stable groups separately.
bool match_reference(std::vector<EigenSeed>& items, const AffineChart& ref) {
  if (items.size() != ref.seeds.size()) return false;
  std::vector<EigenSeed> out(items.size());
  std::vector<bool> used(items.size(), false);
  for (std::size_t r = 0; r < ref.seeds.size(); ++r) {
    const EigenSeed& t = ref.seeds[r];
    double best = INFINITY;
    std::size_t arg = items.size();
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (used[i] || items[i].kind != t.kind) continue;
      if ((items[i].lambda.real() > 0) != ref.dirs[r].unstable) continue;
      double d = std::abs(items[i].lambda - t.lambda);
      if (d < best) best = d, arg = i;
    }
    if (arg == items.size()) return false;
    used[arg] = true;
    out[r] = items[arg];
    Eigen::VectorXcd& u = out[r].u;
    std::complex<double> ip = t.u.dot(u);  // conj(t)^T u
    if (t.kind == EigKind::Real) {
      if (ip.real() < 0) u = -u;
    } else if (std::abs(ip) > 0) {
      u *= std::conj(ip) / std::abs(ip);
    }
  }
  items = out;
  return true;
}

}  // namespace

AffineChart build_chart(const FastSlowSystem& sys, const Vec& x_bar, const Vec& y_bar, const AffineChart* ref) {
  AffineChart c;
  const int n = static_cast<int>(sys.n());
  c.x_bar = x_bar;
  c.y_bar = y_bar;
  Mat J = sys.fx_point(x_bar, y_bar, 0.0);
  Mat Fy = sys.fy_point(x_bar, y_bar, 0.0);
  c.slope = -approx_inverse(J) * Fy;

  std::vector<EigenSeed> all = floating_eigenpairs(J);
  double scale = std::max(1.0, J.cwiseAbs().maxCoeff());
  std::vector<EigenSeed> items;
  for (const auto& s : all)
    if (s.kind == EigKind::Real || s.lambda.imag() > 0) items.push_back(s);
  for (const auto& s : items)
    if (std::fabs(s.lambda.real()) <= 1e-12 * scale)
      throw HyperbolicityViolated("eigenvalue on the imaginary axis at the chart center");
  std::stable_sort(items.begin(), items.end(), [](const EigenSeed& a, const EigenSeed& b) {
    bool ua = a.lambda.real() > 0, ub = b.lambda.real() > 0;
    if (ua != ub) return ua;
    return a.lambda.real() > b.lambda.real();
  });
  const bool aligned = ref && match_reference(items, *ref);

  Mat P(n, n);
  c.Lambda = Mat::Zero(n, n);
  c.lambda_re.assign(n, Interval(0.0));
  c.lambda_im.assign(n, Interval(0.0));
  int col = 0;
  for (auto& s : items) {
    Direction d;
    d.unstable = s.lambda.real() > 0;
    d.coord = col;
    if (s.kind == EigKind::Real) {
      Vec u = s.u.real();
      Eigen::Index k;
      u.cwiseAbs().maxCoeff(&k);
      if (!aligned && u(k) < 0) u = -u;
      s.u = u.cast<std::complex<double>>();
      P.col(col) = u;
      c.Lambda(col, col) = s.lambda.real();
      c.lambda_re[col] = Interval(s.lambda.real());
      col += 1;
    } else {
      d.pair = true;
      if (!aligned) {
        // Largest component real and positive.
        Eigen::Index k;
        s.u.cwiseAbs().maxCoeff(&k);
        s.u *= std::conj(s.u(k)) / std::abs(s.u(k));
      }
      P.col(col) = s.u.real();
      P.col(col + 1) = s.u.imag();
      double a = s.lambda.real(), b = s.lambda.imag();
      c.Lambda(col, col) = a;
      c.Lambda(col, col + 1) = b;
      c.Lambda(col + 1, col) = -b;
      c.Lambda(col + 1, col + 1) = a;
      c.lambda_re[col] = c.lambda_re[col + 1] = Interval(a);
      c.lambda_im[col] = c.lambda_im[col + 1] = Interval(b);
      col += 2;
    }
    if (d.unstable)
      c.n_u += d.pair ? 2 : 1;
    else
      c.n_s += d.pair ? 2 : 1;
    c.dirs.push_back(d);
    c.seeds.push_back(s);
  }
  c.P = to_imatrix(P);
  c.P_inv = inverse_enclosure(c.P, approx_inverse(P));
  return c;
}

AffineChart chart_from_family(const AffineChart& base, const std::vector<EigenPairEnclosure>& family) {
  AffineChart c = base;
  const std::size_t n = base.P.rows();
  IMatrix P(n, n);
  for (std::size_t k = 0; k < base.dirs.size(); ++k) {
    const Direction& d = base.dirs[k];
    const EigenPairEnclosure& e = family[k];
    P.set_col(d.coord, e.u_re);
    c.lambda_re[d.coord] = e.lambda_re;
    c.Lambda(d.coord, d.coord) = e.lambda_re.mid();
    if (d.pair) {
      P.set_col(d.coord + 1, e.u_im);
      c.lambda_re[d.coord + 1] = e.lambda_re;
      c.lambda_im[d.coord] = c.lambda_im[d.coord + 1] = e.lambda_im;
      double b = e.lambda_im.mid();
      c.Lambda(d.coord + 1, d.coord + 1) = e.lambda_re.mid();
      c.Lambda(d.coord, d.coord + 1) = b;
      c.Lambda(d.coord + 1, d.coord) = -b;
    }
  }
  c.P = P;
  c.P_inv = inverse_enclosure(P);
  return c;
}

IVector chart_image(const AffineChart& c, const IVector& z, const IVector& Y) {
  IVector W = slow_offset(c, Y);
  IVector X = to_ivector(c.x_bar) + to_imatrix(c.slope) * W + c.P * z;
  return X;
}

TransformedJet transformed_jet(const FastSlowSystem& sys, const AffineChart& c, const IVector& z, const IVector& Y,
                               double eps0) {
  TransformedJet t;
  const Interval eps = eps_range(eps0);
  const IMatrix S = to_imatrix(c.slope);
  IVector X = chart_image(c, z, Y);
  FieldJet j = sys.jet(X, Y, eps);

  IMatrix SGx = S * j.gx;
  IMatrix Gx = j.fx - eps * SGx;
  IMatrix Gy = j.fy - eps * (S * j.gy);
  IVector Geps = j.feps - S * j.g - eps * (S * j.geps);

  t.Mz = c.P_inv * (Gx * c.P);
  t.Mw = c.P_inv * (Gx * S + Gy);
  t.z_eta = Interval(eps0) * (c.P_inv * Geps);
  t.gz = eps * (j.gx * c.P);
  t.gw = eps * (j.gx * S + j.gy);
  t.w_eta = Interval(eps0) * (j.g + eps * j.geps);

  t.zc = mid(z);
  IVector xc = to_ivector(c.x_bar) + c.P * to_ivector(t.zc);
  IVector yc = to_ivector(c.y_bar);
  IVector G = sys.f(xc, yc, eps) - eps * (S * sys.g(xc, yc, eps));
  t.c = c.P_inv * G;
  return t;
}

IVector residual_bounds(const FastSlowSystem& sys, const AffineChart& c, const IVector& z, const IVector& Y,
                        double eps0) {
  TransformedJet t = transformed_jet(sys, c, z, Y, eps0);
  IMatrix L = to_imatrix(c.Lambda);
  IVector zc = to_ivector(t.zc);
  IVector dz = z - zc;
  return t.c - L * zc + (t.Mz - L) * dz + t.Mw * slow_offset(c, Y);
}

BlockBox derive_box(const AffineChart& c, const IVector& delta, const std::vector<Interval>& lambda, double eta_u,
                    double eta_s, const IVector& Y) {
  BlockBox b;
  const std::size_t n = delta.size();
  b.z = IVector(n);
  b.Y = Y;
  b.eta_u = eta_u;
  b.eta_s = eta_s;
  b.radius.assign(n, 0.0);
  for (const auto& d : c.dirs) {
    const Interval& lam = lambda[d.coord];
    const double eta = d.unstable ? eta_u : eta_s;
    if (d.unstable && !(lam.lo() > 0.0))
      throw HyperbolicityViolated("unstable eigenvalue enclosure touches the imaginary axis");
    if (!d.unstable && !(lam.hi() < 0.0))
      throw HyperbolicityViolated("stable eigenvalue enclosure touches the imaginary axis");
    if (d.pair) {
      double speed = d.unstable ? lam.lo() : -lam.hi();
      double R = (Interval(mag2(delta[d.coord], delta[d.coord + 1])) / Interval(speed) + Interval(eta)).hi();
      b.radius[d.coord] = b.radius[d.coord + 1] = R;
      b.z[d.coord] = b.z[d.coord + 1] = Interval(-R, R);
      continue;
    }
    const Interval& dl = delta[d.coord];
    Interval L(d.unstable ? lam.lo() : lam.hi());
    Interval e(eta);
    Interval lo, hi;
    if (d.unstable) {
      lo = -Interval(dl.hi()) / L - e;
      hi = -Interval(dl.lo()) / L + e;
    } else {
      lo = -Interval(dl.lo()) / L - e;
      hi = -Interval(dl.hi()) / L + e;
    }
    b.z[d.coord] = Interval(lo.lo(), std::fmax(lo.lo(), hi.hi()));
  }
  return b;
}

FastSaddleBlock verify_block(const FastSlowSystem& sys, const AffineChart& c, const BlockBox& box, const IVector& delta,
                             const std::vector<Interval>& lambda, const IVector& E, double eps0) {
  FastSaddleBlock blk;
  blk.chart = c;
  blk.box = box;
  blk.delta = delta;
  blk.lambda_bounds = lambda;
  blk.E = E;
  blk.self_consistent = box.z.subset_of(E);

  TransformedJet t;
  try {
    t = transformed_jet(sys, c, box.z, box.Y, eps0);
  } catch (const Error& e) {
    blk.diagnostic = e.what();
    return blk;
  }
  const std::size_t n = box.z.size();
  const IVector W = slow_offset(c, box.Y);
  const IVector w_term = t.Mw * W;
  bool all_ok = true;

  auto row_sum = [&](std::size_t i, const IVector& z, const std::vector<bool>& skip) {
    Interval s = t.c[i] + w_term[i];
    for (std::size_t k = 0; k < n; ++k) {
      if (skip[k]) {
        s -= t.Mz(i, k) * Interval(t.zc(k));
        continue;
      }
      s += t.Mz(i, k) * (z[k] - Interval(t.zc(k)));
    }
    return s;
  };

  for (const auto& d : c.dirs) {
    if (!d.pair) {
      const int i = d.coord;
      for (int side : {-1, 1}) {
        IVector zf = box.z;
        zf[i] = Interval(side > 0 ? box.z[i].hi() : box.z[i].lo());
        Interval der = row_sum(i, zf, std::vector<bool>(n, false));
        FaceCheck f;
        f.coord = i;
        f.side = side;
        f.exit = d.unstable;
        f.derivative = der;
        // Outward normal derivative must be positive on exits, negative on entrances.
        bool outward_positive = side > 0 ? der.lo() > 0.0 : der.hi() < 0.0;
        bool outward_negative = side > 0 ? der.hi() < 0.0 : der.lo() > 0.0;
        f.ok = d.unstable ? outward_positive : outward_negative;
        all_ok = all_ok && f.ok;
        blk.faces.push_back(f);
      }
      continue;
    }
    const int p = d.coord;
    std::vector<bool> skip(n, false);
    skip[p] = skip[p + 1] = true;
    Interval r1 = row_sum(p, box.z, skip);
    Interval r2 = row_sum(p + 1, box.z, skip);
    IMatrix Mpp = t.Mz.select({p, p + 1}, {p, p + 1});
    LogNormBounds ln = log_norm_bounds(Mpp);
    Interval R(box.radius[p]);
    Interval rest(mag2(r1, r2));
    FaceCheck f;
    f.coord = p;
    f.side = 0;
    f.exit = d.unstable;
    if (d.unstable) {
      f.derivative = Interval(ln.ml_lower) * R - rest;
      f.ok = f.derivative.lo() > 0.0;
    } else {
      f.derivative = Interval(ln.l_upper) * R + rest;
      f.ok = f.derivative.hi() < 0.0;
    }
    all_ok = all_ok && f.ok;
    blk.faces.push_back(f);
  }
  blk.isolation_certified = all_ok;
  if (!all_ok) {
    for (const auto& f : blk.faces)
      if (!f.ok) {
        blk.diagnostic = "face sign violated at coordinate " + std::to_string(f.coord) +
                         (f.side > 0 ? " (upper)" : f.side < 0 ? " (lower)" : " (radial)");
        break;
      }
  } else if (!blk.self_consistent) {
    blk.diagnostic = "box not contained in the residual domain";
  }
  return blk;
}

FastSaddleBlock construct_block(const FastSlowSystem& sys, const AffineChart& c, const IVector& Y, double eps0,
                                const std::vector<Interval>& lambda, const BlockOptions& opts) {
  const std::size_t n = sys.n();
  const double abs_pad = opts.pad_abs * (1.0 + c.x_bar.lpNorm<Eigen::Infinity>());
  double rel = opts.pad_rel;

  auto derive = [&](const IVector& E) {
    IVector delta = residual_bounds(sys, c, E, Y, eps0);
    BlockBox b = derive_box(c, delta, lambda, opts.eta_u, opts.eta_s, Y);
    pad_box(b, c, rel, abs_pad);
    return std::make_pair(b, delta);
  };

  auto [b0, d0] = derive(thin_zero(n));
  IVector E = inflate(b0.z, opts.inflate);
  FastSaddleBlock last;
  last.chart = c;
  last.box = b0;
  last.delta = d0;
  last.lambda_bounds = lambda;
  last.diagnostic = "self-consistency iteration did not converge";
  int face_retries = 0;
  for (int it = 0; it < opts.max_iter; ++it) {
    auto [b, delta] = derive(E);
    if (b.z.subset_of(E)) {
      last = verify_block(sys, c, b, delta, lambda, E, eps0);
      if (last.certified()) return last;
      if (face_retries++ >= 3) return last;
      rel *= 4.0;
      E = inflate(hull(E, b.z), opts.inflate);
      --it;
      continue;
    }
    E = inflate(hull(E, b.z), opts.inflate);
    last.box = b;
    last.delta = delta;
  }
  return last;
}

}  // namespace fsv
