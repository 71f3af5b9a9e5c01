#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fsv/rates.hpp"

namespace fsv {

// One branch of the critical manifold over a slow box.
struct BranchSpec {
  std::string name;
  Vec x0;  // approximate equilibrium for the first cell
  IVector Y;
  std::vector<int> subdivisions;
  double eta_u = 0.0;
  double eta_s = 0.0;
  double M_u = 10.0;
  double M_s = 10.0;
  double l_u = 0.0;
  double l_s = 0.0;
};

enum class Mode { Bundle, Tube, Cone };

struct PipelineOptions {
  double eps0 = 0.0;
  double M = 10.0;  // slope for the rate constants
  int jobs = 1;
  int refine_depth = 6;
  KrawczykOptions krawczyk;
  BlockOptions block;
};

enum class Stage { Equilibrium, Seed, SeedCone, Gershgorin, Eigen, Target, Inclusion, Rates, TargetCone, Cone, Ok };

const char* to_string(Stage s);
const char* to_string(Mode m);

struct GershgorinCheck {
  GershgorinResult result;
  bool ok = false;
};

// Disks of P^-1 A P (complex diagonalization when the chart has pairs);
// ok iff disjoint and none meets the imaginary axis.
GershgorinCheck gershgorin_check(const AffineChart& c, const IMatrix& a);

struct CellResult {
  std::size_t grid = 0;  // row-major index in the initial partition
  std::string path;      // bisection path below the grid cell ('0' lower half)
  IVector Y;
  Stage failed_at = Stage::Ok;
  std::string diagnostic;

  std::optional<FastSaddleBlock> seed;
  std::optional<ConeCertificate> seed_cone_u, seed_cone_s;
  std::optional<GershgorinCheck> gershgorin;
  std::vector<EigenPairEnclosure> family;
  std::optional<FastSaddleBlock> target;
  IVector seed_in_target;  // seed box in the target chart
  std::optional<ConeCertificate> cone_u, cone_s;  // target or inflated boxes
  std::optional<RateConstants> rates;
  std::optional<RateOrder> order;

  bool ok() const { return failed_at == Stage::Ok; }
};

struct GlueCertificate {
  bool ok = false;
  std::size_t pairs_checked = 0;
  std::vector<std::string> failures;
  std::pair<std::size_t, std::size_t> first_failure{0, 0};  // cell indices of failures.front()
  IVector span;
};

struct BranchResult {
  BranchSpec spec;
  Mode mode = Mode::Bundle;
  std::vector<CellResult> cells;  // leaves, ordered by grid index then path
  GlueCertificate glue;
  std::optional<int> k;  // minimum rate order over the cells
  double seconds = 0.0;

  std::size_t failed() const;
  bool ok() const { return failed() == 0 && glue.ok; }
};

// Per-cell pipeline. Bundle: seed, Gershgorin, eigenpair families and rates
// on the seed. Tube adds targets, the inclusion test and rates on the target.
// Cone adds cone checks over the inflated boxes.
BranchResult run_branch(const FastSlowSystem& sys, const BranchSpec& spec, Mode mode, const PipelineOptions& opts);

inline BranchResult run_bundle(const FastSlowSystem& sys, const BranchSpec& spec, const PipelineOptions& opts) {
  return run_branch(sys, spec, Mode::Bundle, opts);
}
inline BranchResult run_tube(const FastSlowSystem& sys, const BranchSpec& spec, const PipelineOptions& opts) {
  return run_branch(sys, spec, Mode::Tube, opts);
}

// Cone checks on an existing tube with new slopes and lengths.
BranchResult run_cone(const FastSlowSystem& sys, const BranchResult& tube, double M_u, double M_s, double l_u,
                      double l_s, const PipelineOptions& opts);

// Adjacency checks: neighbouring cells share a nonempty Y face and their
// eigenpair enclosures intersect (eigenvectors up to sign).
GlueCertificate glue(const std::vector<CellResult>& cells, const BranchSpec& spec);

// Throws the first CellFailed / InclusionFailed / ConeFailed / GlueFailed.
void require_certified(const BranchResult& r);

// Eigenpair families on a small window around a slow point, using the seed
// of the cell containing it.
struct SampleRow {
  Vec y;
  IVector window;
  std::size_t cell = 0;
  std::vector<EigenPairEnclosure> family;
  bool ok = false;
  std::string diagnostic;
};

std::vector<SampleRow> sample_eigenpairs(const FastSlowSystem& sys, const BranchResult& r, const std::vector<Vec>& ys,
                                         double half_width, const PipelineOptions& opts);

}  // namespace fsv
