// Command-line front end: seeded sampling, exact soliton evaluation, averaged
// RH solves, and the LLN / CLT / correlation / verification experiments.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "nlsgas/experiment.hpp"

using namespace nlsgas;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_dir = "out";
  int threads = -1;            // -1: keep config value
  long long seed = -1;         // -1: keep config value
};

ExperimentConfig load_config(const GlobalOpts& g) {
  ExperimentConfig cfg = g.config_path.empty() ? ExperimentConfig::defaults()
                                               : ExperimentConfig::from_file(g.config_path);
  if (g.threads >= 0) cfg.threads = g.threads;
  if (g.seed >= 0) cfg.base_seed = static_cast<std::uint64_t>(g.seed);
  cfg.validate();
  return cfg;
}

void add_global(CLI::App* cmd, GlobalOpts& g) {
  cmd->add_option("--config", g.config_path, "experiment config (JSON)");
  cmd->add_option("--out", g.out_dir, "output directory");
  cmd->add_option("--threads", g.threads, "worker threads (0 = hardware)");
  cmd->add_option("--seed", g.seed, "override base seed");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random N-soliton laboratory for the focusing NLS equation"};
  app.require_subcommand(1);
  GlobalOpts g;

  int opt_n = 8;
  double opt_t = 0.0, opt_xmin = -5.0, opt_xmax = 5.0;
  int opt_nx = 101;
  std::string opt_route = "residue";
  double opt_x = 0.0;

  CLI::App* c_sample = app.add_subcommand("sample", "draw seeded spectral data");
  add_global(c_sample, g);
  c_sample->add_option("--n", opt_n, "sample size N");

  CLI::App* c_soliton = app.add_subcommand("soliton-eval", "evaluate psi_N on an x-grid");
  add_global(c_soliton, g);
  c_soliton->add_option("--n", opt_n, "sample size N");
  c_soliton->add_option("--t", opt_t, "time");
  c_soliton->add_option("--xmin", opt_xmin);
  c_soliton->add_option("--xmax", opt_xmax);
  c_soliton->add_option("--nx", opt_nx, "grid points");
  c_soliton->add_option("--route", opt_route, "residue | dressing");

  CLI::App* c_avg = app.add_subcommand("solve-averaged", "solve the averaged problem at a point");
  add_global(c_avg, g);
  c_avg->add_option("--x", opt_x, "position");
  c_avg->add_option("--t", opt_t, "time");
  bool all_points = false;
  c_avg->add_flag("--all-points", all_points, "solve at every config point");

  CLI::App* c_lln = app.add_subcommand("lln", "law-of-large-numbers experiment");
  add_global(c_lln, g);
  CLI::App* c_clt = app.add_subcommand("clt", "central-limit-theorem experiment");
  add_global(c_clt, g);
  CLI::App* c_corr = app.add_subcommand("corr", "two-point correlation experiment");
  add_global(c_corr, g);
  CLI::App* c_verify = app.add_subcommand("verify", "run the invariant suite");
  add_global(c_verify, g);

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = load_config(g);

    if (c_sample->parsed()) {
      const SpectralSample s =
          make_sample(cfg.build_domain(), cfg.build_interpolant(), opt_n, cfg.base_seed);
      std::cout << "k,re_lambda,im_lambda,re_c,im_c\n";
      for (int k = 0; k < s.n(); ++k)
        std::cout << k << ',' << fmt(s.lambda[k].real()) << ',' << fmt(s.lambda[k].imag())
                  << ',' << fmt(s.c[k].real()) << ',' << fmt(s.c[k].imag()) << '\n';
      return 0;
    }

    if (c_soliton->parsed()) {
      const SpectralSample s =
          make_sample(cfg.build_domain(), cfg.build_interpolant(), opt_n, cfg.base_seed);
      const double bound = amplitude_bound(s);
      std::cout << "x,t,re_psi,im_psi,abs_psi,amplitude_bound\n";
      for (int i = 0; i < opt_nx; ++i) {
        const double x =
            opt_nx > 1 ? opt_xmin + (opt_xmax - opt_xmin) * i / (opt_nx - 1) : opt_xmin;
        const cdouble psi = opt_route == "dressing" ? nsoliton_dressing(s, x, opt_t)
                                                    : nsoliton_residue(s, x, opt_t);
        std::cout << fmt(x) << ',' << fmt(opt_t) << ',' << fmt(psi.real()) << ','
                  << fmt(psi.imag()) << ',' << fmt(std::abs(psi)) << ',' << fmt(bound) << '\n';
      }
      return 0;
    }

    if (c_avg->parsed()) {
      const auto grid = std::make_shared<const ContourGrid>(cfg.build_contour());
      const auto kernel =
          std::make_shared<const AveragedKernel>(cfg.build_domain(), cfg.build_interpolant());
      std::vector<SpacetimePoint> pts;
      if (all_points)
        pts = cfg.points;
      else
        pts.emplace_back(opt_x, opt_t);
      std::cout << "x,t,re_psi_inf,im_psi_inf,modsq_inf,sie_residual\n";
      for (const SpacetimePoint& p : pts) {
        const RHSolution sol = averaged_solution(kernel, grid, p, true);
        const cdouble psi = recover_field(sol);
        std::cout << fmt(p.x) << ',' << fmt(p.t) << ',' << fmt(psi.real()) << ','
                  << fmt(psi.imag()) << ',' << fmt(recover_modsq(sol)) << ','
                  << fmt(sol.sie_residual) << '\n';
      }
      return 0;
    }

    if (c_lln->parsed()) {
      const LlnSummary s = run_lln(cfg);
      write_lln(s, g.out_dir);
      std::cout << "lln: wrote " << g.out_dir << "/lln.csv ("
                << (s.valid ? "valid" : "INVALID: failure budget exceeded") << ")\n";
      for (size_t q = 0; q < s.slope_dpsi.size(); ++q)
        std::cout << "  point (" << s.points[q].x << "," << s.points[q].t
                  << "): slope_dpsi=" << s.slope_dpsi[q] << " slope_dmod=" << s.slope_dmod[q]
                  << '\n';
      return s.valid ? 0 : 1;
    }

    if (c_clt->parsed()) {
      const CltSummary s = run_clt(cfg);
      write_clt(s, g.out_dir);
      std::cout << "clt: wrote " << g.out_dir << "/clt.csv ("
                << (s.valid ? "valid" : "INVALID: failure budget exceeded") << ")\n";
      return s.valid ? 0 : 1;
    }

    if (c_corr->parsed()) {
      const CorrSummary s = run_corr(cfg);
      write_corr(s, g.out_dir);
      std::cout << "corr: emp=(" << fmt(s.empirical.real()) << "," << fmt(s.empirical.imag())
                << ") pred=(" << fmt(s.predicted.real()) << "," << fmt(s.predicted.imag())
                << ") se=(" << fmt(s.se_re) << "," << fmt(s.se_im) << ")\n";
      return s.valid ? 0 : 1;
    }

    if (c_verify->parsed()) {
      const VerifyReport rep = run_verify(cfg);
      write_verify(rep, cfg, g.out_dir);
      for (const CheckResult& c : rep.checks)
        std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  value=" << fmt(c.value)
                  << "  tol=" << fmt(c.tol) << (c.note.empty() ? "" : "  (" + c.note + ")")
                  << '\n';
      std::cout << (rep.all_pass() ? "verify: all checks passed\n"
                                   : "verify: FAILURES present\n");
      return rep.all_pass() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
