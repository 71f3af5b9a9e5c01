#include "fsv/app.hpp"

#include <chrono>
#include <iostream>

#include "CLI11.hpp"

namespace fsv {

RunReport execute(const RunConfig& cfg, const std::string& command, std::ostream* log) {
  auto t0 = std::chrono::steady_clock::now();
  Mode mode = Mode::Tube;
  if (command == "bundle") mode = Mode::Bundle;
  else if (command == "cone") mode = Mode::Cone;
  else if (command != "tube" && command != "smoothness") throw ConfigError("unknown command '" + command + "'");

  FastSlowSystem sys(cfg.system);
  PipelineOptions opts;
  opts.eps0 = cfg.eps0;
  opts.M = cfg.M;
  opts.jobs = cfg.jobs;
  opts.refine_depth = cfg.refine_depth;

  RunReport r;
  r.command = command;
  r.config = cfg;
  for (const auto& b : cfg.branches) {
    r.branches.push_back(run_branch(sys, b, mode, opts));
    if (log) {
      const auto& br = r.branches.back();
      *log << br.spec.name << ": " << br.cells.size() - br.failed() << "/" << br.cells.size() << " cells certified";
      if (br.k) *log << ", k = " << *br.k;
      *log << ", glue " << (br.glue.ok ? "ok" : "failed") << " (" << br.seconds << " s)\n";
      for (std::size_t i = 0; i < br.cells.size(); ++i) {
        const auto& c = br.cells[i];
        if (!c.ok()) *log << "  cell " << i << " [" << c.Y[0].lo() << ", " << c.Y[0].hi() << "] failed at "
                          << to_string(c.failed_at) << ": " << c.diagnostic << "\n";
      }
      for (const auto& f : br.glue.failures) *log << "  glue: " << f << "\n";
    }
  }
  if (!cfg.samples.points.empty() && !r.branches.empty()) {
    r.samples = sample_eigenpairs(sys, r.branches.front(), cfg.samples.points, cfg.samples.half_width, opts);
    if (log)
      for (const auto& s : r.samples)
        if (!s.ok) *log << "  sample at " << s.y.transpose() << ": " << s.diagnostic << "\n";
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

int exit_code(const RunReport& r) { return r.certified() ? kExitCertified : kExitFailed; }

namespace {

struct Args {
  std::string config, preset, out = "fsval-out";
  int jobs = 0;
  int refine_depth = -1;
  double M = 0.0;
  bool smoothness = false;
};

void add_run_options(CLI::App* sub, Args& a) {
  sub->add_option("--config", a.config, "JSON configuration file");
  sub->add_option("--preset", a.preset, "built-in configuration")->check(CLI::IsMember(preset_names()));
  sub->add_option("--out", a.out, "output directory");
  sub->add_option("--jobs", a.jobs, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--refine-depth", a.refine_depth, "bisection depth for failed cells")->check(CLI::NonNegativeNumber);
  sub->add_option("--M", a.M, "cone slope used in the rate constants");
  sub->add_flag("--smoothness", a.smoothness, "write smoothness.csv");
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Validated tubular neighbourhoods of slow manifolds"};
  app.require_subcommand(1);
  Args args;
  std::vector<std::pair<std::string, CLI::App*>> runs;
  for (const char* name : {"bundle", "tube", "cone", "smoothness"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " pipeline");
    add_run_options(sub, args);
    runs.emplace_back(name, sub);
  }
  CLI::App* list = app.add_subcommand("preset-list", "list the built-in configurations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  if (list->parsed()) {
    for (const auto& n : preset_names()) {
      RunConfig c = preset(n);
      std::cout << n << ": " << c.system.fast.size() << " fast, " << c.system.slow.size() << " slow, eps0 "
                << fmt17(c.eps0);
      for (const auto& [k, v] : c.system.params) std::cout << ", " << k << " = " << v;
      std::cout << "\n";
    }
    return kExitCertified;
  }

  std::string command;
  for (const auto& [name, sub] : runs)
    if (sub->parsed()) command = name;

  RunConfig cfg;
  try {
    if (args.config.empty() == args.preset.empty()) throw ConfigError("give exactly one of --config and --preset");
    cfg = args.config.empty() ? preset(args.preset) : load_config(args.config);
    if (args.jobs > 0) cfg.jobs = args.jobs;
    if (args.refine_depth >= 0) cfg.refine_depth = args.refine_depth;
    if (args.M != 0.0) {
      if (!(args.M > 1.0)) throw ConfigError("--M must exceed 1");
      cfg.M = args.M;
    }
    FastSlowSystem check(cfg.system);
  } catch (const Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    RunReport r = execute(cfg, command, &std::cout);
    write_reports(r, args.out, args.smoothness || cfg.smoothness || command == "smoothness");
    std::cout << (r.certified() ? "certified" : "FAILED") << " (" << r.seconds << " s), reports in " << args.out
              << "\n";
    return exit_code(r);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailed;
  }
}

}  // namespace fsv
