#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "klshell/bench.hpp"

using namespace klshell;

TEST_SUITE("bench") {

TEST_CASE("closed-form strip solution satisfies the governing equations") {
  const AnalyticCantilever a{-1.0, 10.0, 1e7, 0.1, 1.0};
  // closed-form derivatives substituted into the coupled strip equations
  const double uA = a.uA(), wA = a.wA();
  for (double th : {0.1, 0.4, 0.8, 1.2, 1.5}) {
    const double urtt = uA * (2.0 / M_PI) * (2.0 * std::cos(th) - th * std::sin(th));
    const double utt =
        -wA * std::cos(th) + uA * (2.0 / M_PI) * (std::cos(th) - th * std::sin(th));
    const double eps = (utt + a.ur(th)) / a.R;
    const double kap = (urtt - 2.0 * utt - a.ur(th)) / (a.R * a.R);
    const double sig = a.E * a.T * eps;
    const double M = a.E * std::pow(a.T, 3) / 12.0 * kap;
    CHECK(sig == doctest::Approx(a.sigma(th)).epsilon(1e-10));
    CHECK(M == doctest::Approx(a.couple(th)).epsilon(1e-10));
  }
  // clamped end values for q = -1, L = 1, R = 10
  CHECK(a.sigma(0.0) == doctest::Approx(-2.0));
  CHECK(a.couple(0.0) == doctest::Approx(-10.0));
  CHECK(a.cauchy(0.0) == doctest::Approx(-1.0));
  CHECK(a.ur(0.0) == 0.0);
  CHECK(a.utheta(0.0) == 0.0);
  // common normalization: qR^3/(E L T^3) = -0.1 gives uA ~ -0.3 pi L
  CHECK(a.uA() == doctest::Approx(-0.3 * M_PI * (1.0 + 0.01 / 300.0)).epsilon(1e-12));
}

TEST_CASE("strip case: displacement and support reaction") {
  CaseConfig cfg;
  cfg.bcase = BenchCase::Cantilever;
  cfg.m = 32;
  cfg.slenderness = 1000;
  cfg.wantErrors = true;
  cfg.wantFields = true;
  const ResultRecord r = runCase(cfg);
  const AnalyticCantilever a{-1.0, 10.0, 1e4 / std::pow(0.01, 3), 0.01, 1.0};
  CHECK(r.nDof == 3 * (32 + 2));
  CHECK(std::abs(r.uA / a.uA() - 1.0) < 0.01);
  CHECK(std::abs(r.supportCauchy - (-1.0)) < 1e-7);  // assembly roundoff floor
  CHECK(r.sigMin == doctest::Approx(-2.0).epsilon(0.02));
  CHECK(r.coupleMin == doctest::Approx(-10.0).epsilon(0.02));
  CHECK(r.cauchyMin == doctest::Approx(-1.0).epsilon(0.02));
}

TEST_CASE("strip errors decrease under refinement") {
  CaseConfig cfg;
  cfg.bcase = BenchCase::Cantilever;
  cfg.slenderness = 1000;
  cfg.wantErrors = true;
  const auto rows = convergenceSweep(cfg, {4, 8, 16});
  for (size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].errors.u < rows[i - 1].errors.u);
    CHECK(rows[i].errors.sigma < rows[i - 1].errors.sigma);
    CHECK(rows[i].errors.couple < rows[i - 1].errors.couple);
  }
}

TEST_CASE("dof bookkeeping per case") {
  CaseConfig cfg;
  cfg.bcase = BenchCase::Scordelis;
  cfg.m = 4;
  cfg.slenderness = 100;
  CaseSetup cs = buildCase(cfg);
  CHECK(cs.mesh.patch.n1() * cs.mesh.patch.n2() == 6 * 8);

  cfg.bcase = BenchCase::Hemisphere;
  CaseSetup hs = buildCase(cfg);
  CHECK(hs.mesh.patch.n1() == 6);
  CHECK(hs.mesh.patch.n2() == 6);
}

TEST_CASE("sweep table is deterministic") {
  const auto dir = std::filesystem::temp_directory_path();
  CaseConfig cfg;
  cfg.bcase = BenchCase::Cantilever;
  cfg.slenderness = 100;
  cfg.wantErrors = true;
  cfg.wantFields = true;

  auto readAll = [](const std::string& p) {
    std::ifstream is(p);
    return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
  };
  cfg.outDir = (dir / "klshell_sweep_a").string();
  convergenceSweep(cfg, {2, 4});
  cfg.outDir = (dir / "klshell_sweep_b").string();
  convergenceSweep(cfg, {2, 4});
  CHECK(readAll((dir / "klshell_sweep_a/results.csv").string()) ==
        readAll((dir / "klshell_sweep_b/results.csv").string()));
  std::filesystem::remove_all(dir / "klshell_sweep_a");
  std::filesystem::remove_all(dir / "klshell_sweep_b");
}

TEST_CASE("single-entry sweep and unreachable targets") {
  CaseConfig cfg;
  cfg.bcase = BenchCase::Cantilever;
  cfg.slenderness = 100;
  cfg.wantErrors = true;
  const auto rows = convergenceSweep(cfg, {4});
  CHECK(rows.size() == 1);

  // infinite targets: the coarsest mesh wins everywhere
  const auto scan = efficiencyScan(cfg, {100.0, 1000.0}, {2, 4}, 1e300, 1e300);
  for (const auto& row : scan) {
    CHECK(row.dofsDisplacement == 3 * (2 + 2));
    CHECK(row.dofsStress == 3 * (2 + 2));
  }
}

TEST_CASE("run directory artifacts") {
  const auto dir = std::filesystem::temp_directory_path() / "klshell_run";
  CaseConfig cfg;
  cfg.bcase = BenchCase::Cantilever;
  cfg.m = 4;
  cfg.slenderness = 100;
  cfg.wantFields = true;
  cfg.outDir = dir.string();
  runCase(cfg);
  CHECK(std::filesystem::exists(dir / "results.csv"));
  CHECK(std::filesystem::exists(dir / "fields.csv"));
  CHECK(std::filesystem::exists(dir / "fields.vtk"));
  CHECK(std::filesystem::exists(dir / "run.txt"));
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
