#include "fsv/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fsv {

using ojson = nlohmann::ordered_json;

bool RunReport::certified() const {
  for (const auto& b : branches)
    if (!b.ok()) return false;
  for (const auto& s : samples)
    if (!s.ok) return false;
  return true;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

ojson iv(const Interval& x) { return ojson::array({fmt17(x.lo()), fmt17(x.hi())}); }

ojson ivec(const IVector& v) {
  ojson a = ojson::array();
  for (const auto& x : v) a.push_back(iv(x));
  return a;
}

ojson vec(const Vec& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(fmt17(v(i)));
  return a;
}

ojson mat(const Mat& m) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec(m.row(i).transpose()));
  return a;
}

ojson family(const std::vector<EigenPairEnclosure>& f) {
  ojson a = ojson::array();
  for (const auto& e : f) {
    ojson o;
    o["kind"] = e.kind == EigKind::Real ? "real" : "complex";
    o["lambda_re"] = iv(e.lambda_re);
    if (e.kind == EigKind::Complex) o["lambda_im"] = iv(e.lambda_im);
    o["u_re"] = ivec(e.u_re);
    if (e.kind == EigKind::Complex) o["u_im"] = ivec(e.u_im);
    a.push_back(o);
  }
  return a;
}

std::string face_label(const FaceCheck& f) {
  std::string s = "z" + std::to_string(f.coord) + (f.side > 0 ? "+" : f.side < 0 ? "-" : "r");
  return s + (f.exit ? ":exit" : ":entrance");
}

ojson block(const FastSaddleBlock& b) {
  ojson o;
  o["x_bar"] = vec(b.chart.x_bar);
  o["slope"] = mat(b.chart.slope);
  o["P"] = mat(b.chart.P_mid());
  o["P_rad"] = fmt17(b.chart.P.max_rad());
  o["z"] = ivec(b.box.z);
  o["eta_u"] = fmt17(b.box.eta_u);
  o["eta_s"] = fmt17(b.box.eta_s);
  o["self_consistent"] = b.self_consistent;
  o["isolation_certified"] = b.isolation_certified;
  ojson faces = ojson::array();
  for (const auto& f : b.faces) faces.push_back({{"face", face_label(f)}, {"derivative", iv(f.derivative)}});
  o["faces"] = faces;
  return o;
}

ojson rates(const RateConstants& r) {
  return {{"M", fmt17(r.M)},           {"mu_s1", fmt17(r.mu_s1)},   {"mu_s2", fmt17(r.mu_s2)},
          {"xi_u1", fmt17(r.xi_u1)},   {"xi_u2", fmt17(r.xi_u2)},   {"mu_ss1", fmt17(r.mu_ss1)},
          {"mu_ss2", fmt17(r.mu_ss2)}, {"xi_su1", fmt17(r.xi_su1)}, {"xi_su2", fmt17(r.xi_su2)}};
}

ojson cone(const ConeCertificate& c) {
  return {{"kind", to_string(c.kind)},
          {"M", fmt17(c.M)},
          {"holds", c.holds},
          {"margin_graph", fmt17(c.margin_graph)},
          {"margin_cone", fmt17(c.margin_cone)}};
}

ojson cell(const CellResult& c, std::size_t id) {
  ojson o;
  o["id"] = id;
  o["grid"] = c.grid;
  o["path"] = c.path;
  o["Y"] = ivec(c.Y);
  o["status"] = c.ok() ? "certified" : "failed";
  if (!c.ok()) {
    o["stage"] = to_string(c.failed_at);
    o["diagnostic"] = c.diagnostic;
  }
  if (c.seed) o["seed"] = block(*c.seed);
  if (c.seed_cone_u) o["seed_cones"] = ojson::array({cone(*c.seed_cone_u), cone(*c.seed_cone_s)});
  if (c.gershgorin) o["gershgorin_disjoint"] = c.gershgorin->ok;
  if (!c.family.empty()) o["eigenpairs"] = family(c.family);
  if (c.target) {
    o["target"] = block(*c.target);
    o["seed_in_target"] = ivec(c.seed_in_target);
  }
  if (c.cone_u) o["cone_u"] = cone(*c.cone_u);
  if (c.cone_s) o["cone_s"] = cone(*c.cone_s);
  if (c.rates) o["rates"] = rates(*c.rates);
  if (c.order) {
    o["rate_status"] = to_string(c.order->status);
    o["k"] = c.order->k;
    o["k_floor"] = c.order->k_floor;
    o["k_su_ratio"] = fmt17(c.order->k_su_ratio);
    o["k_ss_ratio"] = fmt17(c.order->k_ss_ratio);
  }
  return o;
}

std::string csv_row(const std::vector<std::string>& f) {
  std::string s;
  for (std::size_t i = 0; i < f.size(); ++i) s += (i ? "," : "") + f[i];
  return s + "\n";
}

}  // namespace

std::string report_json(const RunReport& r, bool include_volatile) {
  ojson o;
  o["schema"] = 1;
  o["tool"] = "fsval";
  o["command"] = r.command;
  o["config"] = r.config.name;
  o["eps0"] = fmt17(r.config.eps0);
  o["M"] = fmt17(r.config.M);
  o["status"] = r.certified() ? "certified" : "failed";
  ojson params = ojson::object();
  for (const auto& [k, v] : r.config.system.params) params[k] = iv(v);
  o["params"] = params;
  ojson branches = ojson::array();
  for (const auto& b : r.branches) {
    ojson bo;
    bo["name"] = b.spec.name;
    bo["mode"] = to_string(b.mode);
    bo["status"] = b.ok() ? "certified" : "failed";
    bo["eta_u"] = fmt17(b.spec.eta_u);
    bo["eta_s"] = fmt17(b.spec.eta_s);
    bo["M_u"] = fmt17(b.spec.M_u);
    bo["M_s"] = fmt17(b.spec.M_s);
    bo["l_u"] = fmt17(b.spec.l_u);
    bo["l_s"] = fmt17(b.spec.l_s);
    bo["cells_total"] = b.cells.size();
    bo["cells_failed"] = b.failed();
    if (b.k) bo["k"] = *b.k;
    ojson failed = ojson::array();
    for (std::size_t i = 0; i < b.cells.size(); ++i)
      if (!b.cells[i].ok()) failed.push_back(i);
    bo["failed_cells"] = failed;
    bo["glue"] = {{"ok", b.glue.ok},
                  {"pairs_checked", b.glue.pairs_checked},
                  {"span", ivec(b.glue.span)},
                  {"failures", b.glue.failures}};
    ojson cells = ojson::array();
    for (std::size_t i = 0; i < b.cells.size(); ++i) cells.push_back(cell(b.cells[i], i));
    bo["cells"] = cells;
    branches.push_back(bo);
  }
  o["branches"] = branches;
  ojson samples = ojson::array();
  for (const auto& s : r.samples) {
    ojson so;
    so["y"] = vec(s.y);
    so["window"] = ivec(s.window);
    so["cell"] = s.cell;
    so["ok"] = s.ok;
    if (!s.ok) so["diagnostic"] = s.diagnostic;
    so["eigenpairs"] = family(s.family);
    samples.push_back(so);
  }
  o["samples"] = samples;
  if (include_volatile) {
    ojson t;
    t["total_seconds"] = r.seconds;
    for (const auto& b : r.branches) t[b.spec.name] = b.seconds;
    o["timings"] = t;
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    o["generated_at"] = buf;
  }
  return o.dump(1) + "\n";
}

std::string cells_csv(const RunReport& r) {
  std::ostringstream out;
  out << "branch,cell,grid,path,status,stage,y_lo,y_hi,x_bar,P_mid,z_lo,z_hi,faces\n";
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + v[i];
    return s;
  };
  for (const auto& b : r.branches) {
    for (std::size_t i = 0; i < b.cells.size(); ++i) {
      const auto& c = b.cells[i];
      std::vector<std::string> ylo, yhi, xb, P, zlo, zhi, faces;
      for (const auto& y : c.Y) ylo.push_back(fmt17(y.lo())), yhi.push_back(fmt17(y.hi()));
      const FastSaddleBlock* blk = c.target ? &*c.target : c.seed ? &*c.seed : nullptr;
      if (blk) {
        for (Eigen::Index k = 0; k < blk->chart.x_bar.size(); ++k) xb.push_back(fmt17(blk->chart.x_bar(k)));
        Mat Pm = blk->chart.P_mid();
        for (Eigen::Index a = 0; a < Pm.rows(); ++a)
          for (Eigen::Index k = 0; k < Pm.cols(); ++k) P.push_back(fmt17(Pm(a, k)));
        for (const auto& z : blk->box.z) zlo.push_back(fmt17(z.lo())), zhi.push_back(fmt17(z.hi()));
        for (const auto& f : blk->faces) faces.push_back(face_label(f));
      }
      out << csv_row({b.spec.name, std::to_string(i), std::to_string(c.grid), c.path.empty() ? "-" : c.path,
                      c.ok() ? "certified" : "failed", to_string(c.failed_at), join(ylo), join(yhi), join(xb),
                      join(P), join(zlo), join(zhi), join(faces)});
    }
  }
  return out.str();
}

std::string eigenpairs_csv(const RunReport& r) {
  std::ostringstream out;
  out << "source,branch,cell,index,kind,lambda_re_lo,lambda_re_hi,lambda_im_lo,lambda_im_hi,u_re_lo,u_re_hi,u_im_lo,"
         "u_im_hi\n";
  auto row = [&](const std::string& src, const std::string& br, std::size_t cell, std::size_t k,
                 const EigenPairEnclosure& e) {
    std::string ulo, uhi, vlo, vhi;
    for (std::size_t i = 0; i < e.u_re.size(); ++i) {
      ulo += (i ? " " : "") + fmt17(e.u_re[i].lo());
      uhi += (i ? " " : "") + fmt17(e.u_re[i].hi());
      if (e.kind == EigKind::Complex) {
        vlo += (i ? " " : "") + fmt17(e.u_im[i].lo());
        vhi += (i ? " " : "") + fmt17(e.u_im[i].hi());
      }
    }
    const bool cx = e.kind == EigKind::Complex;
    out << csv_row({src, br, std::to_string(cell), std::to_string(k), cx ? "complex" : "real",
                    fmt17(e.lambda_re.lo()), fmt17(e.lambda_re.hi()), cx ? fmt17(e.lambda_im.lo()) : "0",
                    cx ? fmt17(e.lambda_im.hi()) : "0", ulo, uhi, vlo, vhi});
  };
  for (const auto& b : r.branches)
    for (std::size_t i = 0; i < b.cells.size(); ++i)
      for (std::size_t k = 0; k < b.cells[i].family.size(); ++k) row("cell", b.spec.name, i, k, b.cells[i].family[k]);
  for (const auto& s : r.samples)
    for (std::size_t k = 0; k < s.family.size(); ++k) {
      std::string y;
      for (Eigen::Index d = 0; d < s.y.size(); ++d) y += (d ? " " : "") + fmt17(s.y(d));
      row("sample@" + y, r.branches.empty() ? "" : r.branches.front().spec.name, s.cell, k, s.family[k]);
    }
  return out.str();
}

std::string smoothness_csv(const RunReport& r) {
  std::ostringstream out;
  out << "branch,cell,y_center,k,rate_status,k_floor\n";
  for (const auto& b : r.branches)
    for (std::size_t i = 0; i < b.cells.size(); ++i) {
      const auto& c = b.cells[i];
      std::string y;
      for (std::size_t d = 0; d < c.Y.size(); ++d) y += (d ? " " : "") + fmt17(c.Y[d].mid());
      if (!c.order) {
        out << csv_row({b.spec.name, std::to_string(i), y, "", "unavailable", ""});
        continue;
      }
      out << csv_row({b.spec.name, std::to_string(i), y, std::to_string(c.order->k), to_string(c.order->status),
                      std::to_string(c.order->k_floor)});
    }
  return out.str();
}

void write_reports(const RunReport& r, const std::string& dir, bool smoothness) {
  std::filesystem::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + name + " in " + dir);
    f << text;
  };
  put("report.json", report_json(r));
  put("cells.csv", cells_csv(r));
  put("eigenpairs.csv", eigenpairs_csv(r));
  if (smoothness) put("smoothness.csv", smoothness_csv(r));
}

}  // namespace fsv
