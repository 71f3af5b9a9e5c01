#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "fsv/linalg.hpp"

namespace fsv {

enum class EigKind { Real, Complex };

struct EigenPairEnclosure {
  EigKind kind = EigKind::Real;
  Interval lambda_re;
  Interval lambda_im;
  IVector u_re;
  IVector u_im;
  IVector cell;
  Interval eps_range;
};

enum class KrawczykStatus { UniqueFamily, NoZero, Inconclusive };

struct KrawczykResult {
  KrawczykStatus status = KrawczykStatus::Inconclusive;
  std::optional<EigenPairEnclosure> enclosure;
  int iterations = 0;
  std::string diagnostic;
};

// Approximate eigenpair; for Complex kind, lambda has positive imaginary part.
struct EigenSeed {
  EigKind kind = EigKind::Real;
  std::complex<double> lambda;
  Eigen::VectorXcd u;
};

struct KrawczykOptions {
  int max_iter = 30;
  int retries = 3;
  double inflation = 8.0;
  double min_radius = 1e-6;
};

// (A u - lam u, |u|^2 - 1) in floating point.
Vec residual_real(const Vec& u0, double lam0, const Mat& a);

// [[A - lam I, -u], [2u^T, 0]].
IMatrix bordered_jacobian(const IVector& u, const Interval& lam, const IMatrix& a);

// Jacobian of the split complex system in the unknowns (u_re, u_im, lam_re,
// lam_im), with the phase fixed by Im u_k = 0.
IMatrix bordered_jacobian_complex(const IVector& u_re, const IVector& u_im, const Interval& lam_re,
                                  const Interval& lam_im, const IMatrix& a, int k);

// One Krawczyk run from the given initial box x0 (layout as above).
KrawczykResult krawczyk_run(const IMatrix& a, const EigenSeed& seed, const IVector& x0, int max_iter);

// Validate the eigenpair family of every matrix in `a` near `seed`, choosing
// and inflating the initial box automatically.
KrawczykResult krawczyk_validate(const IMatrix& a, const EigenSeed& seed, const KrawczykOptions& opts = {});

// Validate all eigenpairs; complex-conjugate pairs are validated once and the
// conjugate is reflected. Throws FamilyValidationFailed.
std::vector<EigenPairEnclosure> validate_family(const IMatrix& a, const std::vector<EigenSeed>& seeds,
                                                const KrawczykOptions& opts = {});

// Floating eigenpairs of a real matrix, unit normalized; complex eigenvalues
// come in conjugate pairs with the positive-imaginary member first.
std::vector<EigenSeed> floating_eigenpairs(const Mat& a);

}  // namespace fsv
