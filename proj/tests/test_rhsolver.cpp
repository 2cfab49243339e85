#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlsgas/rhsolver.hpp"
#include "nlsgas/rng.hpp"
#include "nlsgas/soliton.hpp"

using namespace nlsgas;

namespace {

const EigenvalueDomain kDisk = EigenvalueDomain::disk({0.0, 1.0}, 0.5);
const InterpolantR kOne = InterpolantR::constant(1.0);

std::shared_ptr<const ContourGrid> default_grid(int nodes = 128, double clearance = 0.25) {
  return std::make_shared<const ContourGrid>(ContourGrid::build(kDisk, nodes, clearance));
}

// brute-force midpoint quadrature of iint r(w)/(z-w) d2w / m over the disk
cdouble brute_force_F(cdouble center, double R, cdouble z, int m = 400) {
  cdouble acc(0, 0);
  long cnt = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const cdouble w = center + cdouble((i + 0.5) / m * 2 * R - R, (j + 0.5) / m * 2 * R - R);
      if (std::abs(w - center) <= R) {
        acc += 1.0 / (z - w);
        ++cnt;
      }
    }
  return acc / static_cast<double>(cnt);
}

}  // namespace

TEST_CASE("spacetime phase") {
  const SpacetimePoint p(0.7, 0.3);
  CHECK(p.theta({0, 0}) == cdouble(0, 0));
  Rng rng(1);
  for (int i = 0; i < 5; ++i) {
    const cdouble z{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    CHECK(std::abs(p.theta(z) - (cdouble(0, 2) * 0.7 * z + cdouble(0, 2) * 0.3 * z * z)) <=
          1e-15);
    // linear in the coefficients
    const SpacetimePoint q(1.4, 0.3);
    CHECK(std::abs(q.theta(z) - p.theta(z) - cdouble(0, 2) * 0.7 * z) <= 1e-14);
  }
  CHECK_THROWS(SpacetimePoint(0.0, -1.0));
}

TEST_CASE("random jump entries and unit determinant") {
  SpectralSample empty;
  const JumpField j0 = JumpField::random(empty, SpacetimePoint(0.3, 0.1));
  CHECK((j0.J({0.1, 1.7}, true) - Mat2::Identity()).norm() == 0.0);

  SpectralSample s1;
  s1.lambda = {{0, 1}};
  s1.c = {1.0};
  const JumpField j1 = JumpField::random(s1, SpacetimePoint(0, 0));
  CHECK(std::abs(j1.J({0, 2}, true)(1, 0) - cdouble(0, 1)) <= 1e-15);  // -1/(2i-i) = i

  const SpectralSample s16 = make_sample(kDisk, kOne, 16, 5);
  const JumpField j16 = JumpField::random(s16, SpacetimePoint(0.4, 0.2));
  const auto grid = default_grid();
  for (int j = 0; j < grid->total(); ++j)
    CHECK(std::abs(det2(j16.J(grid->nodes()[j], grid->on_plus(j))) - 1.0) <= 1e-12);
}

TEST_CASE("averaged jump: mean-value property against brute force") {
  const auto kernel = std::make_shared<const AveragedKernel>(kDisk, kOne);
  // mean value property: F(2i) = 1/(2i - i) = -i
  CHECK(std::abs(kernel->F({0, 2}) - cdouble(0, -1)) <= 1e-12);
  // independent 2-D brute force
  const cdouble bf = brute_force_F({0, 1}, 0.5, {0, 2});
  CHECK(std::abs(kernel->F({0, 2}) - bf) <= 2e-3);
  const cdouble z2{0.8, 1.9};
  CHECK(std::abs(kernel->F(z2) - brute_force_F({0, 1}, 0.5, z2)) <= 2e-3);
  // node-doubling self check passed at construction
  CHECK(kernel->selfcheck_error() <= 1e-10);

  const JumpField ja = JumpField::averaged(kernel, SpacetimePoint(0, 0));
  CHECK(std::abs(ja.J({0, 2}, true)(1, 0) - cdouble(0, 1)) <= 1e-12);

  // r == 0 gives the identity jump
  const JumpField j0 = JumpField::averaged(kDisk, InterpolantR::constant(0.0),
                                           SpacetimePoint(0.5, 0.1));
  CHECK((j0.J({0.3, 1.6}, true) - Mat2::Identity()).norm() <= 1e-15);
}

TEST_CASE("dJ/dx carries the +-2iz factor") {
  const SpectralSample s = make_sample(kDisk, kOne, 4, 9);
  const JumpField j = JumpField::random(s, SpacetimePoint(0.3, 0.2));
  const cdouble zp{0.1, 1.7}, zm{0.1, -1.7};
  CHECK(std::abs(j.dJ_dx(zp, true)(1, 0) - cdouble(0, 2) * zp * j.J(zp, true)(1, 0)) <= 1e-15);
  CHECK(std::abs(j.dJ_dx(zm, false)(0, 1) + cdouble(0, 2) * zm * j.J(zm, false)(0, 1)) <=
        1e-15);
}

TEST_CASE("identity jump solves trivially") {
  const auto grid = default_grid(64);
  const JumpField j0 =
      JumpField::averaged(kDisk, InterpolantR::constant(0.0), SpacetimePoint(0.2, 0.1));
  RHSolution sol = solve_sie(j0, grid);
  for (const Mat2& m : sol.mu) CHECK((m - Mat2::Identity()).norm() <= 1e-13);
  CHECK(sol.M1.norm() <= 1e-13);
  CHECK(std::abs(recover_field(sol)) <= 1e-13);
  sol = solve_sie_dx(j0, sol);
  for (const Mat2& m : sol.dmu) CHECK(m.norm() <= 1e-13);
  CHECK(recover_modsq(sol) == doctest::Approx(0.0));
  CHECK((eval_M_off(sol, {2.5, 0.3}) - Mat2::Identity()).norm() <= 1e-13);
}

TEST_CASE("random-jump SIE reproduces the exact two-soliton") {
  const SpectralSample s = make_sample(kDisk, kOne, 2, 3);
  const SpacetimePoint p(0.4, 0.2);
  const cdouble exact = nsoliton_residue(s, p.x, p.t);
  const auto grid = default_grid(256);
  RHSolution sol = solve_sie(JumpField::random(s, p), grid);
  CHECK(std::abs(recover_field(sol) - exact) <= 1e-6);
  CHECK(sol.sie_residual <= 1e-10);
  sol = solve_sie_dx(JumpField::random(s, p), sol);
  CHECK(std::abs(recover_modsq(sol) - std::norm(exact)) <= 1e-6);
}

TEST_CASE("random-jump SIE matches the algebraic soliton up to N = 8") {
  const auto grid = default_grid(256);
  for (int n : {4, 8}) {
    const SpectralSample s = make_sample(kDisk, kOne, n, 40 + n);
    for (const SpacetimePoint p : {SpacetimePoint(0.0, 0.0), SpacetimePoint(0.7, 0.3)}) {
      const RHSolution sol = solve_sie(JumpField::random(s, p), grid);
      CHECK(std::abs(recover_field(sol) - nsoliton_residue(s, p.x, p.t)) <= 1e-6);
    }
  }
}

TEST_CASE("eigenvalue outside the contour is rejected") {
  SpectralSample s;
  s.lambda = {{2.5, 1.0}};
  s.c = {1.0};
  CHECK_THROWS(solve_sie(JumpField::random(s, SpacetimePoint(0, 0)), default_grid(64)));
}

TEST_CASE("averaged solve: small-r Neumann expansion") {
  const auto grid = default_grid(64);
  const double eps = 1e-3;
  const JumpField j = JumpField::averaged(kDisk, InterpolantR::constant(eps),
                                          SpacetimePoint(0.3, 0.1));
  const RHSolution sol = solve_sie(j, grid);
  // one-term Neumann: mu ~ I + C_-(J - I)
  ContourDensity w;
  w.val.assign(grid->total(), Mat2::Zero());
  for (int k = 0; k < grid->total(); ++k)
    w.val[k] = j.J(grid->nodes()[k], grid->on_plus(k)) - Mat2::Identity();
  const ContourDensity cm = cauchy_minus(*grid, w);
  double worst = 0;
  for (int k = 0; k < grid->total(); ++k)
    worst = std::max(worst, frob(sol.mu[k] - Mat2::Identity() - cm.val[k]));
  CHECK(worst <= 1e-5);  // O(eps^2)
}

TEST_CASE("derivative solve against finite differences") {
  const auto grid = default_grid();
  const auto kernel = std::make_shared<const AveragedKernel>(kDisk, kOne);
  const double x0 = 0.3, t0 = 0.2, h = 1e-4;
  RHSolution sol = averaged_solution(kernel, grid, SpacetimePoint(x0, t0), true);
  const RHSolution solp = averaged_solution(kernel, grid, SpacetimePoint(x0 + h, t0), false);
  const RHSolution solm = averaged_solution(kernel, grid, SpacetimePoint(x0 - h, t0), false);
  const Mat2 fd = (solp.M1 - solm.M1) / (2 * h);
  CHECK((sol.dM1 - fd).norm() <= 1e-7);
  CHECK(std::abs(sol.modsq_imag) <= 1e-9);
  // internal consistency: |psi|^2 from the derivative route vs the field
  CHECK(std::abs(recover_modsq(sol) - std::norm(recover_field(sol))) <= 1e-6);
  // |psi_inf|^2 nonnegative along a grid
  for (int i = 0; i <= 20; ++i) {
    const double x = -2.0 + 4.0 * i / 20;
    const RHSolution s2 = averaged_solution(kernel, grid, SpacetimePoint(x, 0.1), true);
    CHECK(recover_modsq(s2) >= -1e-10);
  }
}

TEST_CASE("M1 and off-contour M structure") {
  const auto grid = default_grid();
  const auto kernel = std::make_shared<const AveragedKernel>(kDisk, kOne);
  const RHSolution sol = averaged_solution(kernel, grid, SpacetimePoint(0.5, 0.15), true);

  // structure of the 1/z coefficient: off-diagonals conjugate up to sign,
  // diagonals mutual conjugates
  CHECK(std::abs(std::conj(sol.M1(1, 0)) + sol.M1(0, 1)) <= 1e-9);
  CHECK(std::abs(std::conj(sol.M1(1, 1)) - sol.M1(0, 0)) <= 1e-9);

  Rng rng(23);
  for (int i = 0; i < 10; ++i) {
    const double phi = rng.uniform(0, 2 * PI);
    const double rad = grid->radius() * (i % 2 ? 1.7 : 0.5);
    const cdouble z = grid->center_plus() + rad * cdouble(std::cos(phi), std::sin(phi));
    const Mat2 M = eval_M_off(sol, z);
    const Mat2 Mc = eval_M_off(sol, std::conj(z));
    CHECK(std::abs(det2(M) - 1.0) <= 1e-9);
    CHECK(std::abs(M(1, 1) - std::conj(Mc(0, 0))) <= 1e-9);
    CHECK(std::abs(M(1, 0) + std::conj(Mc(0, 1))) <= 1e-9);
  }
}

TEST_CASE("grid convergence of the averaged field") {
  const auto kernel = std::make_shared<const AveragedKernel>(kDisk, kOne);
  const SpacetimePoint p(0.3, 0.2);
  std::vector<cdouble> psis;
  for (int n : {128, 256}) {
    const auto g = std::make_shared<const ContourGrid>(ContourGrid::build(kDisk, n, 0.25));
    psis.push_back(recover_field(averaged_solution(kernel, g, p, false)));
  }
  CHECK(std::abs(psis[1] - psis[0]) <= 1e-8);
}
