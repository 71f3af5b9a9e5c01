#include "fsv/eigenpair.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace fsv {

namespace {

int largest_component(const Eigen::VectorXcd& u) {
  int k = 0;
  for (int i = 1; i < u.size(); ++i)
    if (std::abs(u(i)) > std::abs(u(k))) k = i;
  return k;
}

// Unknown vector of the bordered system at a point.
struct Layout {
  EigKind kind;
  int n;
  int k;  // Real: sign anchor. Complex: index with Im u_k = 0.
  int size() const { return kind == EigKind::Real ? n + 1 : 2 * (n + 1); }
};

Vec pack(const Layout& L, const Eigen::VectorXcd& u, std::complex<double> lam) {
  Vec x(L.size());
  if (L.kind == EigKind::Real) {
    x.head(L.n) = u.real();
    x(L.n) = lam.real();
  } else {
    x.head(L.n) = u.real();
    x.segment(L.n, L.n) = u.imag();
    x(2 * L.n) = lam.real();
    x(2 * L.n + 1) = lam.imag();
  }
  return x;
}

IVector residual(const Layout& L, const IMatrix& a, const IVector& x) {
  const int n = L.n;
  IVector r(L.size());
  if (L.kind == EigKind::Real) {
    const Interval& lam = x[n];
    for (int i = 0; i < n; ++i) {
      Interval s(0.0);
      for (int j = 0; j < n; ++j) s += a(i, j) * x[j];
      r[i] = s - lam * x[i];
    }
    Interval nn(0.0);
    for (int i = 0; i < n; ++i) nn += sqr(x[i]);
    r[n] = nn - Interval(1.0);
    return r;
  }
  const Interval& lr = x[2 * n];
  const Interval& li = x[2 * n + 1];
  for (int i = 0; i < n; ++i) {
    Interval sr(0.0), si(0.0);
    for (int j = 0; j < n; ++j) {
      sr += a(i, j) * x[j];
      si += a(i, j) * x[n + j];
    }
    r[i] = sr - (lr * x[i] - li * x[n + i]);
    r[n + i] = si - (lr * x[n + i] + li * x[i]);
  }
  Interval nn(0.0);
  for (int i = 0; i < 2 * n; ++i) nn += sqr(x[i]);
  r[2 * n] = nn - Interval(1.0);
  r[2 * n + 1] = x[n + L.k];
  return r;
}

IMatrix jacobian_of(const Layout& L, const IMatrix& a, const IVector& x) {
  const int n = L.n;
  if (L.kind == EigKind::Real) {
    IVector u(n);
    for (int i = 0; i < n; ++i) u[i] = x[i];
    return bordered_jacobian(u, x[n], a);
  }
  IVector ur(n), ui(n);
  for (int i = 0; i < n; ++i) {
    ur[i] = x[i];
    ui[i] = x[n + i];
  }
  return bordered_jacobian_complex(ur, ui, x[2 * n], x[2 * n + 1], a, L.k);
}

IVector thin(const Vec& v) { return to_ivector(v); }

// A few floating Newton steps on the midpoint problem.
Vec refine(const Layout& L, const Mat& a_mid, Vec x) {
  IMatrix a = to_imatrix(a_mid);
  for (int it = 0; it < 4; ++it) {
    IVector xi = thin(x);
    Vec r = mid(residual(L, a, xi));
    Mat J = mid(jacobian_of(L, a, xi));
    Eigen::FullPivLU<Mat> lu(J);
    if (!lu.isInvertible()) break;
    Vec dx = lu.solve(-r);
    if (!dx.allFinite()) break;
    x += dx;
    if (dx.lpNorm<Eigen::Infinity>() < 1e-15) break;
  }
  return x;
}

EigenPairEnclosure extract(const Layout& L, const IVector& x) {
  EigenPairEnclosure e;
  e.kind = L.kind;
  const int n = L.n;
  e.u_re = IVector(n);
  e.u_im = IVector(n, Interval(0.0));
  for (int i = 0; i < n; ++i) e.u_re[i] = x[i];
  if (L.kind == EigKind::Real) {
    e.lambda_re = x[n];
    e.lambda_im = Interval(0.0);
  } else {
    for (int i = 0; i < n; ++i) e.u_im[i] = x[n + i];
    e.u_im[L.k] = Interval(0.0);
    e.lambda_re = x[2 * n];
    e.lambda_im = x[2 * n + 1];
  }
  return e;
}

Layout layout_for(const EigenSeed& seed) {
  Layout L{seed.kind, static_cast<int>(seed.u.size()), largest_component(seed.u)};
  return L;
}

// Normalize the seed vector: unit length and, for complex kind, u_k real and
// positive.
Eigen::VectorXcd normalized(const EigenSeed& seed, int k) {
  Eigen::VectorXcd u = seed.u;
  if (seed.kind == EigKind::Complex) {
    std::complex<double> ph = std::conj(u(k)) / std::abs(u(k));
    u *= ph;
  } else {
    u = u.real().cast<std::complex<double>>();
  }
  u /= u.norm();
  return u;
}

}  // namespace

Vec residual_real(const Vec& u0, double lam0, const Mat& a) {
  Vec r(u0.size() + 1);
  r.head(u0.size()) = a * u0 - lam0 * u0;
  r(u0.size()) = u0.squaredNorm() - 1.0;
  return r;
}

IMatrix bordered_jacobian(const IVector& u, const Interval& lam, const IMatrix& a) {
  const std::size_t n = u.size();
  IMatrix J(n + 1, n + 1, Interval(0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) J(i, j) = a(i, j);
    J(i, i) = a(i, i) - lam;
    J(i, n) = -u[i];
    J(n, i) = Interval(2.0) * u[i];
  }
  return J;
}

IMatrix bordered_jacobian_complex(const IVector& u_re, const IVector& u_im, const Interval& lam_re,
                                  const Interval& lam_im, const IMatrix& a, int k) {
  const std::size_t n = u_re.size();
  const std::size_t N = 2 * (n + 1);
  IMatrix J(N, N, Interval(0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      J(i, j) = a(i, j);
      J(n + i, n + j) = a(i, j);
    }
    J(i, i) = a(i, i) - lam_re;
    J(n + i, n + i) = a(i, i) - lam_re;
    J(i, n + i) = lam_im;
    J(n + i, i) = -lam_im;
    J(i, 2 * n) = -u_re[i];
    J(i, 2 * n + 1) = u_im[i];
    J(n + i, 2 * n) = -u_im[i];
    J(n + i, 2 * n + 1) = -u_re[i];
    J(2 * n, i) = Interval(2.0) * u_re[i];
    J(2 * n, n + i) = Interval(2.0) * u_im[i];
  }
  J(2 * n + 1, n + k) = Interval(1.0);
  return J;
}

KrawczykResult krawczyk_run(const IMatrix& a, const EigenSeed& seed, const IVector& x0box, int max_iter) {
  KrawczykResult res;
  Layout L = layout_for(seed);
  Eigen::VectorXcd u = normalized(seed, L.k);
  Vec xc = refine(L, mid(a), pack(L, u, seed.lambda));
  if (x0box.size() != static_cast<std::size_t>(L.size())) {
    res.diagnostic = "initial box has wrong dimension";
    return res;
  }
  // Keep the center inside the initial box.
  for (int i = 0; i < L.size(); ++i)
    if (!x0box[i].contains(xc(i))) xc(i) = x0box[i].mid();
  if (x0box[L.k].contains_zero()) {
    res.diagnostic = "anchor component of the initial box contains 0";
    return res;
  }

  Mat C;
  try {
    C = approx_inverse(mid(jacobian_of(L, a, thin(xc))));
  } catch (const NumericallySingular& e) {
    res.diagnostic = e.what();
    return res;
  }
  IMatrix Ci = to_imatrix(C);
  IVector x0 = thin(xc);
  IVector base = x0 - Ci * residual(L, a, x0);
  IMatrix I = IMatrix::identity(L.size());

  IVector X = x0box;
  bool certified = false;
  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it + 1;
    IMatrix M = I - Ci * jacobian_of(L, a, X);
    IVector K = base + M * (X - x0);
    bool inside = K.subset_interior(X);
    auto Xn = intersect(K, X);
    if (!Xn) {
      res.status = KrawczykStatus::NoZero;
      res.diagnostic = "empty intersection";
      return res;
    }
    if (inside) certified = true;
    double change = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i)
      change = std::fmax(change, (X[i].hi() - X[i].lo()) - ((*Xn)[i].hi() - (*Xn)[i].lo()));
    X = *Xn;
    if (certified && change <= 1e-3 * X.max_rad()) break;
    if (!certified && change == 0.0) break;
  }
  if (!certified) {
    res.diagnostic = "no interior inclusion within the iteration limit";
    return res;
  }
  res.status = KrawczykStatus::UniqueFamily;
  res.enclosure = extract(L, X);
  return res;
}

KrawczykResult krawczyk_validate(const IMatrix& a, const EigenSeed& seed, const KrawczykOptions& opts) {
  Layout L = layout_for(seed);
  Eigen::VectorXcd u = normalized(seed, L.k);
  Mat am = mid(a);
  Vec xc = refine(L, am, pack(L, u, seed.lambda));
  IVector x0 = thin(xc);

  double r = opts.min_radius;
  double res_norm = mid(residual(L, to_imatrix(am), x0)).lpNorm<Eigen::Infinity>();
  r = std::fmax(r, 10.0 * res_norm);
  // First-order spread of the solution over the matrix enclosure.
  try {
    Mat C = approx_inverse(mid(jacobian_of(L, a, x0)));
    IVector F0 = residual(L, a, x0);
    Vec rad(F0.size());
    for (std::size_t i = 0; i < F0.size(); ++i) rad(i) = F0[i].rad();
    r = std::fmax(r, 4.0 * (C.cwiseAbs() * rad).lpNorm<Eigen::Infinity>());
  } catch (const NumericallySingular& e) {
    KrawczykResult out;
    out.diagnostic = e.what();
    return out;
  }

  KrawczykResult out;
  for (int attempt = 0; attempt <= opts.retries; ++attempt) {
    if (r >= std::fabs(xc(L.k))) {
      out.diagnostic += "; initial box would contain 0 in the anchor component";
      break;
    }
    IVector box(x0.size());
    for (std::size_t i = 0; i < box.size(); ++i) box[i] = Interval(xc(i)) + Interval(-r, r);
    out = krawczyk_run(a, seed, box, opts.max_iter);
    if (out.status == KrawczykStatus::UniqueFamily) return out;
    r *= opts.inflation;
  }
  return out;
}

std::vector<EigenPairEnclosure> validate_family(const IMatrix& a, const std::vector<EigenSeed>& seeds,
                                                const KrawczykOptions& opts) {
  std::vector<EigenPairEnclosure> out(seeds.size());
  std::vector<bool> done(seeds.size(), false);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (done[i]) continue;
    EigenSeed s = seeds[i];
    bool conj = false;
    if (s.kind == EigKind::Complex && s.lambda.imag() < 0.0) {
      s.lambda = std::conj(s.lambda);
      s.u = s.u.conjugate();
      conj = true;
    }
    KrawczykResult r = krawczyk_validate(a, s, opts);
    if (r.status != KrawczykStatus::UniqueFamily) throw FamilyValidationFailed(static_cast<int>(i), r.diagnostic);
    EigenPairEnclosure e = *r.enclosure;
    EigenPairEnclosure c = e;
    if (e.kind == EigKind::Complex) {
      c.lambda_im = -e.lambda_im;
      c.u_im = -e.u_im;
    }
    out[i] = conj ? c : e;
    done[i] = true;
    if (s.kind == EigKind::Complex) {
      // Reflect onto the partner in the list, if present.
      for (std::size_t j = i + 1; j < seeds.size(); ++j) {
        if (done[j] || seeds[j].kind != EigKind::Complex) continue;
        if (std::abs(seeds[j].lambda - std::conj(seeds[i].lambda)) < 1e-8 * (1.0 + std::abs(seeds[i].lambda))) {
          out[j] = conj ? e : c;
          done[j] = true;
          break;
        }
      }
    }
  }
  return out;
}

std::vector<EigenSeed> floating_eigenpairs(const Mat& a) {
  Eigen::EigenSolver<Mat> es(a);
  if (es.info() != Eigen::Success) throw EigSolverFailed("eigen decomposition did not converge");
  const int n = static_cast<int>(a.rows());
  std::vector<EigenSeed> out;
  std::vector<bool> used(n, false);
  double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (int i = 0; i < n; ++i) {
    if (used[i]) continue;
    used[i] = true;
    std::complex<double> lam = es.eigenvalues()(i);
    Eigen::VectorXcd v = es.eigenvectors().col(i);
    if (std::fabs(lam.imag()) <= 1e-13 * scale) {
      EigenSeed s;
      s.kind = EigKind::Real;
      s.lambda = lam.real();
      Vec vr = v.real();
      s.u = (vr / vr.norm()).cast<std::complex<double>>();
      out.push_back(s);
      continue;
    }
    EigenSeed s;
    s.kind = EigKind::Complex;
    s.lambda = lam.imag() > 0 ? lam : std::conj(lam);
    s.u = lam.imag() > 0 ? v : Eigen::VectorXcd(v.conjugate());
    s.u /= s.u.norm();
    EigenSeed c = s;
    c.lambda = std::conj(s.lambda);
    c.u = s.u.conjugate();
    out.push_back(s);
    out.push_back(c);
    for (int j = i + 1; j < n; ++j)
      if (!used[j] && std::abs(es.eigenvalues()(j) - std::conj(lam)) < 1e-10 * scale) {
        used[j] = true;
        break;
      }
  }
  return out;
}

}  // namespace fsv
