#include "fsv/tubular.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <thread>

namespace fsv {

const char* to_string(Stage s) {
  switch (s) {
    case Stage::Equilibrium: return "equilibrium";
    case Stage::Seed: return "seed";
    case Stage::SeedCone: return "seed_cone";
    case Stage::Gershgorin: return "gershgorin";
    case Stage::Eigen: return "eigenpairs";
    case Stage::Target: return "target";
    case Stage::Inclusion: return "inclusion";
    case Stage::TargetCone: return "target_cone";
    case Stage::Rates: return "rates";
    case Stage::Cone: return "cone";
    case Stage::Ok: return "ok";
  }
  return "?";
}

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Bundle: return "bundle";
    case Mode::Tube: return "tube";
    case Mode::Cone: return "cone";
  }
  return "?";
}

std::size_t BranchResult::failed() const {
  return std::count_if(cells.begin(), cells.end(), [](const CellResult& c) { return !c.ok(); });
}

namespace {

Interval eps_range(double eps0) { return Interval(0.0, eps0); }

bool off_axis(const GershgorinDisk& d) {
  const Interval r(d.radius.hi());
  return (Interval(d.center_re.lo()) - r).lo() > 0.0 || (Interval(d.center_re.hi()) + r).hi() < 0.0;
}

}  // namespace

GershgorinCheck gershgorin_check(const AffineChart& c, const IMatrix& a) {
  GershgorinCheck g;
  const std::size_t n = a.rows();
  const bool has_pair = std::any_of(c.dirs.begin(), c.dirs.end(), [](const Direction& d) { return d.pair; });
  if (!has_pair) {
    g.result = gershgorin(c.P_inv * (a * c.P));
  } else {
    // Complex eigenvector matrix; its inverse is enclosed through the real
    // form [[Vr, -Vi], [Vi, Vr]].
    Eigen::MatrixXcd V(n, n);
    int col = 0;
    for (std::size_t k = 0; k < c.dirs.size(); ++k) {
      V.col(col++) = c.seeds[k].u;
      if (c.dirs[k].pair) V.col(col++) = c.seeds[k].u.conjugate();
    }
    Mat R(2 * n, 2 * n);
    R << V.real(), -V.imag(), V.imag(), V.real();
    IMatrix W = inverse_enclosure(to_imatrix(R));
    std::vector<int> top(n), bottom(n);
    for (std::size_t i = 0; i < n; ++i) top[i] = static_cast<int>(i), bottom[i] = static_cast<int>(n + i);
    IMatrix Wr = W.select(top, top), Wi = W.select(bottom, top);
    IMatrix AVr = a * to_imatrix(V.real()), AVi = a * to_imatrix(V.imag());
    g.result = gershgorin(Wr * AVr - Wi * AVi, Wr * AVi + Wi * AVr);
  }
  g.ok = g.result.disjoint && std::all_of(g.result.disks.begin(), g.result.disks.end(), off_axis);
  return g;
}

namespace {

struct Context {
  const FastSlowSystem& sys;
  const BranchSpec& spec;
  Mode mode;
  const PipelineOptions& opts;
};

// Box hull(z0) widened per direction: unstable coordinates by du, stable by ds.
IVector widen(const AffineChart& c, const IVector& z0, double du, double ds) {
  IVector z = z0;
  for (const auto& d : c.dirs) {
    double r = d.unstable ? du : ds;
    int m = d.pair ? 2 : 1;
    for (int i = 0; i < m; ++i) z[d.coord + i] = z0[d.coord + i] + Interval(-r, r);
  }
  return z;
}

ConeCertificate cone_on(const Context& ctx, const AffineChart& c, const IVector& z, const IVector& Y, double M,
                        ConeKind kind) {
  RateConstants r = compute_rates(augmented_jacobian_blocks(ctx.sys, c, z, Y, ctx.opts.eps0), M);
  return cone_check(r, kind);
}

void fail(CellResult& cell, Stage s, const std::string& msg) {
  cell.failed_at = s;
  cell.diagnostic = msg;
}

// Rates on z; the cell fails unless the hyperbolicity and gap inequalities hold there.
bool set_rates(const Context& ctx, CellResult& cell, const AffineChart& c, const IVector& z) {
  try {
    RateConstants r = compute_rates(augmented_jacobian_blocks(ctx.sys, c, z, cell.Y, ctx.opts.eps0), ctx.opts.M);
    cell.rates = r;
    cell.order = rate_order(r);
  } catch (const Error& e) {
    cell.rates.reset();
    cell.order.reset();
    fail(cell, Stage::Rates, e.what());
    return false;
  }
  if (cell.order->status != RateStatus::Ok) {
    fail(cell, Stage::Rates, "rate condition fails: no normal hyperbolicity margin");
    return false;
  }
  return true;
}

// Cone checks over R(eta_u + l_u, eta_s + l_u/M_u) and R(eta_u + l_s/M_s, eta_s + l_s)
// around the seed image in the target chart.
void check_cones(const Context& ctx, CellResult& cell, double M_u, double M_s, double l_u, double l_s) {
  const AffineChart& c = cell.target->chart;
  const double eu = ctx.spec.eta_u, es = ctx.spec.eta_s;
  try {
    IVector zu = widen(c, cell.seed_in_target, eu + l_u, es + l_u / M_u);
    cell.cone_u = cone_on(ctx, c, zu, cell.Y, M_u, ConeKind::Unstable);
    IVector zs = widen(c, cell.seed_in_target, eu + l_s / M_s, es + l_s);
    cell.cone_s = cone_on(ctx, c, zs, cell.Y, M_s, ConeKind::Stable);
  } catch (const Error& e) {
    fail(cell, Stage::Cone, e.what());
    return;
  }
  if (!cell.cone_u->holds)
    fail(cell, Stage::Cone, "unstable cone condition fails (margins " + std::to_string(cell.cone_u->margin_graph) +
                                ", " + std::to_string(cell.cone_u->margin_cone) + ")");
  else if (!cell.cone_s->holds)
    fail(cell, Stage::Cone, "stable cone condition fails (margins " + std::to_string(cell.cone_s->margin_graph) +
                                ", " + std::to_string(cell.cone_s->margin_cone) + ")");
}

void run_target(const Context& ctx, CellResult& cell, const AffineChart& chart) {
  const FastSaddleBlock& seed = *cell.seed;
  AffineChart tc;
  try {
    tc = chart_from_family(chart, cell.family);
  } catch (const Error& e) {
    fail(cell, Stage::Target, e.what());
    return;
  }
  BlockOptions bo = ctx.opts.block;
  bo.eta_u = ctx.spec.eta_u;
  bo.eta_s = ctx.spec.eta_s;
  try {
    cell.target = construct_block(ctx.sys, tc, cell.Y, ctx.opts.eps0, tc.lambda_re, bo);
  } catch (const Error& e) {
    fail(cell, Stage::Target, e.what());
    return;
  }
  if (!cell.target->certified()) {
    fail(cell, Stage::Target, cell.target->diagnostic);
    return;
  }

  // Seed re-expressed in the target chart. Both charts share x_bar and the
  // slope, so z_target = [P]^-1 P_seed z_seed.
  const IMatrix Q = tc.P_inv * seed.chart.P;
  const IVector& zs = seed.box.z;
  cell.seed_in_target = Q * zs;
  IVector spread = Q * (zs - zs);
  std::string why;
  for (const auto& d : tc.dirs) {
    const double eta = d.unstable ? ctx.spec.eta_u : ctx.spec.eta_s;
    double ext = d.pair ? sqrt_up((sqr(Interval(spread[d.coord].mag())) + sqr(Interval(spread[d.coord + 1].mag()))).hi())
                        : spread[d.coord].mag();
    if (!(eta > ext)) {
      why = "seed extent " + std::to_string(ext) + " in direction " + std::to_string(d.coord) +
            " is not below eta " + std::to_string(eta);
      break;
    }
  }
  if (why.empty() && !cell.seed_in_target.subset_interior(cell.target->box.z))
    why = "seed is not interior to the target";
  if (!why.empty()) {
    fail(cell, Stage::Inclusion, why);
    return;
  }

  if (!set_rates(ctx, cell, tc, cell.target->box.z)) return;

  if (ctx.mode == Mode::Cone) {
    check_cones(ctx, cell, ctx.spec.M_u, ctx.spec.M_s, ctx.spec.l_u, ctx.spec.l_s);
    return;
  }
  try {
    cell.cone_u = cone_on(ctx, tc, cell.target->box.z, cell.Y, ctx.spec.M_u, ConeKind::Unstable);
    cell.cone_s = cone_on(ctx, tc, cell.target->box.z, cell.Y, ctx.spec.M_s, ConeKind::Stable);
  } catch (const Error& e) {
    fail(cell, Stage::TargetCone, e.what());
    return;
  }
  if (!cell.cone_u->holds || !cell.cone_s->holds)
    fail(cell, Stage::TargetCone, std::string(cell.cone_u->holds ? "stable" : "unstable") + " cone fails on the target");
}

CellResult process_cell(const Context& ctx, const IVector& Y, const AffineChart& chart) {
  CellResult cell;
  cell.Y = Y;
  const auto& opts = ctx.opts;
  BlockOptions bo = opts.block;
  bo.eta_u = bo.eta_s = 0.0;
  try {
    cell.seed = construct_block(ctx.sys, chart, Y, opts.eps0, chart.lambda_re, bo);
  } catch (const Error& e) {
    fail(cell, Stage::Seed, e.what());
    return cell;
  }
  if (!cell.seed->certified()) {
    fail(cell, Stage::Seed, cell.seed->diagnostic);
    return cell;
  }
  try {
    cell.seed_cone_u = cone_on(ctx, chart, cell.seed->box.z, Y, ctx.spec.M_u, ConeKind::Unstable);
    cell.seed_cone_s = cone_on(ctx, chart, cell.seed->box.z, Y, ctx.spec.M_s, ConeKind::Stable);
  } catch (const Error& e) {
    fail(cell, Stage::SeedCone, e.what());
    return cell;
  }
  if (!cell.seed_cone_u->holds || !cell.seed_cone_s->holds) {
    fail(cell, Stage::SeedCone, std::string(cell.seed_cone_u->holds ? "stable" : "unstable") + " cone fails on the seed");
    return cell;
  }

  IMatrix A;
  try {
    A = ctx.sys.fx(chart_image(chart, cell.seed->box.z, Y), Y, eps_range(opts.eps0));
    cell.gershgorin = gershgorin_check(chart, A);
  } catch (const Error& e) {
    fail(cell, Stage::Gershgorin, e.what());
    return cell;
  }
  if (!cell.gershgorin->ok) {
    fail(cell, Stage::Gershgorin, "Gershgorin disks overlap or meet the imaginary axis");
    return cell;
  }
  try {
    cell.family = validate_family(A, chart.seeds, opts.krawczyk);
  } catch (const Error& e) {
    fail(cell, Stage::Eigen, e.what());
    return cell;
  }
  if (ctx.mode == Mode::Bundle) {
    set_rates(ctx, cell, chart, cell.seed->box.z);
    return cell;
  }
  run_target(ctx, cell, chart);
  return cell;
}

// Grid bookkeeping.
std::vector<int> unflatten(std::size_t idx, const std::vector<int>& sub) {
  std::vector<int> m(sub.size());
  for (std::size_t d = sub.size(); d-- > 0;) {
    m[d] = static_cast<int>(idx % sub[d]);
    idx /= sub[d];
  }
  return m;
}

std::size_t flatten(const std::vector<int>& m, const std::vector<int>& sub) {
  std::size_t idx = 0;
  for (std::size_t d = 0; d < sub.size(); ++d) idx = idx * sub[d] + m[d];
  return idx;
}

IVector grid_cell(const BranchSpec& spec, const std::vector<int>& m) {
  IVector Y(spec.Y.size());
  for (std::size_t d = 0; d < Y.size(); ++d) {
    const double lo = spec.Y[d].lo(), hi = spec.Y[d].hi();
    const int N = spec.subdivisions[d];
    auto edge = [&](int j) { return j == 0 ? lo : j == N ? hi : lo + (hi - lo) * j / N; };
    Y[d] = Interval(edge(m[d]), edge(m[d] + 1));
  }
  return Y;
}

// Split along the coordinate widest relative to the full slow box.
std::pair<IVector, IVector> bisect(const IVector& Y, const BranchSpec& spec) {
  std::size_t dim = 0;
  double best = -1.0;
  for (std::size_t d = 0; d < Y.size(); ++d) {
    double rel = Y[d].width() / spec.Y[d].width();
    if (rel > best) best = rel, dim = d;
  }
  IVector a = Y, b = Y;
  const double m = 0.5 * (Y[dim].lo() + Y[dim].hi());
  a[dim] = Interval(Y[dim].lo(), m);
  b[dim] = Interval(m, Y[dim].hi());
  return {a, b};
}

struct PrePass {
  std::vector<std::optional<AffineChart>> charts;
  std::vector<std::string> errors;
  std::vector<Vec> guesses;
};

PrePass pre_pass(const FastSlowSystem& sys, const BranchSpec& spec) {
  std::size_t total = 1;
  for (int s : spec.subdivisions) total *= s;
  PrePass pp;
  pp.charts.resize(total);
  pp.errors.resize(total);
  pp.guesses.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    auto m = unflatten(i, spec.subdivisions);
    const AffineChart* ref = nullptr;
    Vec guess = spec.x0;
    // Reference: the previous cell along the last coordinate, else along the
    // leading one.
    for (std::size_t d = m.size(); d-- > 0;) {
      if (m[d] == 0) continue;
      auto r = m;
      r[d] -= 1;
      std::size_t j = flatten(r, spec.subdivisions);
      guess = pp.guesses[j];
      if (pp.charts[j]) ref = &*pp.charts[j];
      break;
    }
    pp.guesses[i] = guess;
    IVector Y = grid_cell(spec, m);
    try {
      Vec y = mid(Y);
      Vec x = newton_equilibrium(sys, guess, y);
      pp.guesses[i] = x;
      pp.charts[i] = build_chart(sys, x, y, ref);
    } catch (const Error& e) {
      pp.errors[i] = e.what();
    }
  }
  return pp;
}

void refine(const Context& ctx, const IVector& Y, const AffineChart* chart, const Vec& guess, const AffineChart* ref,
            const std::string& err, int depth, const std::string& path, std::vector<CellResult>& out) {
  CellResult cell;
  std::optional<AffineChart> own;
  if (!chart) {
    try {
      Vec y = mid(Y);
      Vec x = newton_equilibrium(ctx.sys, guess, y);
      own = build_chart(ctx.sys, x, y, ref);
      chart = &*own;
    } catch (const Error& e) {
      cell.Y = Y;
      fail(cell, Stage::Equilibrium, err.empty() ? e.what() : err);
    }
  }
  if (chart) cell = process_cell(ctx, Y, *chart);
  cell.path = path;
  // Cone failures depend on the cone lengths, not on the cell size, and a
  // rate failure marks a genuine loss of hyperbolicity.
  if (cell.ok() || depth <= 0 || cell.failed_at == Stage::Cone || cell.failed_at == Stage::Rates) {
    out.push_back(std::move(cell));
    return;
  }
  auto [a, b] = bisect(Y, ctx.spec);
  const Vec g = chart ? chart->x_bar : guess;
  const AffineChart* r = chart ? chart : ref;
  refine(ctx, a, nullptr, g, r, "", depth - 1, path + "0", out);
  refine(ctx, b, nullptr, g, r, "", depth - 1, path + "1", out);
}

}  // namespace

BranchResult run_branch(const FastSlowSystem& sys, const BranchSpec& spec, Mode mode, const PipelineOptions& opts) {
  if (spec.Y.size() != sys.l() || spec.subdivisions.size() != sys.l())
    throw ConfigError("slow box and subdivisions must match the number of slow variables");
  for (int s : spec.subdivisions)
    if (s < 1) throw ConfigError("subdivisions must be at least 1");
  if (static_cast<std::size_t>(spec.x0.size()) != sys.n())
    throw ConfigError("initial equilibrium guess has the wrong dimension");
  if (opts.eps0 < 0.0) throw ConfigError("eps0 must be non-negative");

  auto t0 = std::chrono::steady_clock::now();
  BranchResult res;
  res.spec = spec;
  res.mode = mode;
  const Context ctx{sys, spec, mode, opts};

  PrePass pp = pre_pass(sys, spec);
  const std::size_t total = pp.charts.size();
  std::vector<std::vector<CellResult>> per(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      const AffineChart* chart = pp.charts[i] ? &*pp.charts[i] : nullptr;
      refine(ctx, grid_cell(spec, unflatten(i, spec.subdivisions)), chart, pp.guesses[i], nullptr, pp.errors[i],
             opts.refine_depth, "", per[i]);
      for (auto& c : per[i]) c.grid = i;
    }
  };
  const int jobs = std::max(1, opts.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& v : per)
    for (auto& c : v) res.cells.push_back(std::move(c));

  res.glue = glue(res.cells, spec);
  int k = kMaxOrder;
  bool any = false;
  for (const auto& c : res.cells) {
    if (!c.order) continue;
    any = true;
    k = std::min(k, c.order->status == RateStatus::Ok ? c.order->k : -1);
  }
  if (any) res.k = k;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

BranchResult run_cone(const FastSlowSystem& sys, const BranchResult& tube, double M_u, double M_s, double l_u,
                      double l_s, const PipelineOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  BranchResult res = tube;
  res.mode = Mode::Cone;
  res.spec.M_u = M_u;
  res.spec.M_s = M_s;
  res.spec.l_u = l_u;
  res.spec.l_s = l_s;
  const Context ctx{sys, res.spec, Mode::Cone, opts};
  for (auto& c : res.cells) {
    if (!c.ok() || !c.target) continue;
    check_cones(ctx, c, M_u, M_s, l_u, l_s);
  }
  res.glue = glue(res.cells, res.spec);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

namespace {

std::string compare_families(const CellResult& a, const CellResult& b) {
  if (a.family.size() != b.family.size()) return "different number of eigendirections";
  for (std::size_t k = 0; k < a.family.size(); ++k) {
    const auto& ea = a.family[k];
    const auto& eb = b.family[k];
    const std::string tag = "eigenpair " + std::to_string(k);
    if (!intersect(ea.lambda_re, eb.lambda_re)) return tag + ": eigenvalues do not intersect";
    if (ea.kind == EigKind::Complex) {
      if (!intersect(ea.lambda_im, eb.lambda_im)) return tag + ": eigenvalues do not intersect";
      continue;  // the phase normalization may pick different components
    }
    if (!intersect(ea.u_re, eb.u_re) && !intersect(ea.u_re, -eb.u_re))
      return tag + ": eigenvectors disagree up to sign";
  }
  return "";
}

}  // namespace

GlueCertificate glue(const std::vector<CellResult>& cells, const BranchSpec& spec) {
  GlueCertificate g;
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < cells.size(); ++i) groups[cells[i].grid].push_back(i);

  auto fail_pair = [&](std::size_t i, std::size_t j, const std::string& why) {
    if (g.failures.empty()) g.first_failure = {i, j};
    g.failures.push_back("cells " + std::to_string(i) + " and " + std::to_string(j) + ": " + why);
  };
  auto check = [&](std::size_t i, std::size_t j, bool must_touch) {
    const auto& a = cells[i];
    const auto& b = cells[j];
    if (!intersect(a.Y, b.Y)) {
      if (must_touch) fail_pair(i, j, "gap in Y");
      return;
    }
    ++g.pairs_checked;
    if (!a.ok() || !b.ok()) return;  // reported as cell failures
    std::string why = compare_families(a, b);
    if (!why.empty()) fail_pair(i, j, why);
  };

  for (const auto& [gi, members] : groups) {
    for (std::size_t p = 0; p < members.size(); ++p)
      for (std::size_t q = p + 1; q < members.size(); ++q) check(members[p], members[q], false);
    auto m = unflatten(gi, spec.subdivisions);
    for (std::size_t d = 0; d < m.size(); ++d) {
      if (m[d] + 1 >= spec.subdivisions[d]) continue;
      auto r = m;
      r[d] += 1;
      auto it = groups.find(flatten(r, spec.subdivisions));
      if (it == groups.end()) {
        fail_pair(members.front(), members.front(), "grid cell " + std::to_string(gi) + " has no neighbour results");
        continue;
      }
      std::size_t before = g.pairs_checked;
      for (std::size_t p : members)
        for (std::size_t q : it->second) check(p, q, false);
      if (g.pairs_checked == before)
        fail_pair(members.front(), it->second.front(),
                  "grid cells " + std::to_string(gi) + " and " + std::to_string(it->first) + " do not touch");
    }
  }

  if (!cells.empty()) {
    g.span = cells.front().Y;
    for (const auto& c : cells) g.span = hull(g.span, c.Y);
  }
  const bool all_ok = std::all_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.ok(); });
  g.ok = all_ok && g.failures.empty() && !cells.empty();
  return g;
}

void require_certified(const BranchResult& r) {
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    const auto& c = r.cells[i];
    if (c.ok()) continue;
    if (c.failed_at == Stage::Inclusion) throw InclusionFailed(i, c.diagnostic);
    if (c.failed_at == Stage::Cone) throw ConeFailed(i, "tube", c.diagnostic);
    throw CellFailed(i, to_string(c.failed_at), c.diagnostic);
  }
  if (!r.glue.ok) {
    if (r.glue.failures.empty()) throw GlueFailed(0, 0, "no cells");
    throw GlueFailed(r.glue.first_failure.first, r.glue.first_failure.second, r.glue.failures.front());
  }
}

std::vector<SampleRow> sample_eigenpairs(const FastSlowSystem& sys, const BranchResult& r, const std::vector<Vec>& ys,
                                         double half_width, const PipelineOptions& opts) {
  std::vector<SampleRow> rows;
  for (const Vec& y : ys) {
    SampleRow row;
    row.y = y;
    const CellResult* host = nullptr;
    for (std::size_t i = 0; i < r.cells.size() && !host; ++i) {
      const auto& c = r.cells[i];
      bool inside = true;
      for (std::size_t d = 0; d < c.Y.size(); ++d) inside = inside && c.Y[d].contains(y(d));
      if (inside && c.seed && !c.family.empty()) {
        host = &c;
        row.cell = i;
      }
    }
    if (!host) {
      row.diagnostic = "no validated cell contains the sample point";
      rows.push_back(row);
      continue;
    }
    IVector W(y.size());
    for (Eigen::Index d = 0; d < y.size(); ++d) {
      Interval w = Interval(y(d)) + Interval(-half_width, half_width);
      W[d] = *intersect(w, host->Y[d]);
    }
    row.window = W;
    const AffineChart& c = host->seed->chart;
    try {
      IMatrix A = sys.fx(chart_image(c, host->seed->box.z, W), W, Interval(0.0, opts.eps0));
      row.family = validate_family(A, c.seeds, opts.krawczyk);
      row.ok = true;
    } catch (const Error& e) {
      row.diagnostic = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fsv
