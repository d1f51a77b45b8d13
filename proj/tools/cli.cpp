#include <CLI11.hpp>
#include <iostream>

#include "klshell/bench.hpp"

using namespace klshell;

int main(int argc, char** argv) {
  CLI::App app{"Thin-shell benchmark driver (hybrid B2M1 and classical BpMp discretizations)"};
  app.set_config("--config", "", "declarative key = value configuration file");

  std::string caseName = "cantilever";
  std::string discName = "b2m1";
  std::string redistName = "full";
  CaseConfig cfg;
  std::vector<int> sweep;
  bool fields = true;
  bool errors = false;

  app.add_option("--case", caseName, "cantilever | scordelis | hemisphere")
      ->check(CLI::IsMember({"cantilever", "scordelis", "hemisphere"}));
  app.add_option("--disc", discName, "b2m1 | bpmp")->check(CLI::IsMember({"b2m1", "bpmp"}));
  app.add_option("--p", cfg.p, "polynomial degree for bpmp (2..5)")->check(CLI::Range(2, 5));
  app.add_option("--m", cfg.m, "mesh parameter");
  app.add_option("--rt", cfg.slenderness, "slenderness R/T");
  app.add_flag("--nonlinear", cfg.nonlinear, "geometrically nonlinear solve");
  app.add_flag("--skew", cfg.skew, "skewed roof mesh");
  app.add_option("--redistribute", redistName, "none | lateral | full")
      ->check(CLI::IsMember({"none", "lateral", "full"}));
  app.add_option("--load-scale", cfg.loadScale, "extra load multiplier");
  app.add_option("--steps", cfg.loadSteps, "Newton load steps");
  app.add_option("--sweep", sweep, "mesh sizes for a convergence sweep");
  app.add_option("--grid", cfg.grid, "visualization samples per element and direction");
  app.add_flag("--errors,!--no-errors", errors, "L2 error norms (cantilever)");
  app.add_flag("--fields,!--no-fields", fields, "recovered stress extrema and field export");
  app.add_option("--out", cfg.outDir, "output directory");

  CLI11_PARSE(app, argc, argv);

  cfg.bcase = caseName == "cantilever"  ? BenchCase::Cantilever
              : caseName == "scordelis" ? BenchCase::Scordelis
                                        : BenchCase::Hemisphere;
  cfg.disc = discName == "b2m1" ? Disc::B2M1 : Disc::BpMp;
  cfg.redist = redistName == "none"      ? RedistributionMode::None
               : redistName == "lateral" ? RedistributionMode::Lateral
                                         : RedistributionMode::Full;
  cfg.wantFields = fields;
  cfg.wantErrors = errors || cfg.bcase == BenchCase::Cantilever;

  try {
    if (!sweep.empty()) {
      const auto rows = convergenceSweep(cfg, sweep);
      std::cout << "m,n_dof,u_A,u_B,sig_min,e_u,e_sigma,e_M\n";
      for (const auto& r : rows)
        std::cout << r.m << ',' << r.nDof << ',' << r.uA << ',' << r.uB << ',' << r.sigMin << ','
                  << r.errors.u << ',' << r.errors.sigma << ',' << r.errors.couple << '\n';
      return 0;
    }
    const ResultRecord r = runCase(cfg);
    std::cout << "n_dof      = " << r.nDof << '\n';
    std::cout << "u_A        = " << std::setprecision(12) << r.uA << '\n';
    if (cfg.bcase == BenchCase::Hemisphere) std::cout << "u_B        = " << r.uB << '\n';
    if (cfg.wantFields) {
      std::cout << "sigma_min  = " << r.sigMin << '\n';
      std::cout << "sigma_max  = " << r.sigMax << '\n';
      std::cout << "M_min      = " << r.coupleMin << '\n';
      std::cout << "N_min      = " << r.cauchyMin << '\n';
    }
    if (cfg.wantErrors && cfg.bcase == BenchCase::Cantilever) {
      std::cout << "e_u        = " << r.errors.u << '\n';
      std::cout << "e_sigma    = " << r.errors.sigma << '\n';
      std::cout << "e_M        = " << r.errors.couple << '\n';
      std::cout << "e_N        = " << r.errors.cauchy << '\n';
    }
    if (cfg.nonlinear) {
      std::cout << "iterations =";
      for (int it : r.newtonIters) std::cout << ' ' << it;
      std::cout << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
