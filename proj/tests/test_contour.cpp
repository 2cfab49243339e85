#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlsgas/contour.hpp"
#include "nlsgas/rng.hpp"

using namespace nlsgas;

namespace {

ContourDensity constant_density(const ContourGrid& g, const Mat2& a) {
  ContourDensity h;
  h.val.assign(g.total(), a);
  return h;
}

// density u^k on one circle (zero on the other), u = (s - center)/R
ContourDensity mode_density(const ContourGrid& g, int k, bool on_plus) {
  ContourDensity h;
  h.val.assign(g.total(), Mat2::Zero());
  const int base = on_plus ? 0 : g.n();
  const cdouble c = on_plus ? g.center_plus() : std::conj(g.center_plus());
  for (int j = 0; j < g.n(); ++j) {
    const cdouble u = (g.nodes()[base + j] - c) / g.radius();
    h.val[base + j] = std::pow(u, k) * Mat2::Identity();
  }
  return h;
}

}  // namespace

TEST_CASE("radix-2 fft matches the direct transform") {
  Rng rng(3);
  const int n = 16;
  std::vector<cdouble> a(n), ref(n);
  for (auto& v : a) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  for (int k = 0; k < n; ++k) {
    cdouble s(0, 0);
    for (int j = 0; j < n; ++j)
      s += a[j] * std::exp(cdouble(0, -2.0 * PI * j * k / n));
    ref[k] = s;
  }
  std::vector<cdouble> b = a;
  fft_radix2(b, false);
  for (int k = 0; k < n; ++k) CHECK(std::abs(b[k] - ref[k]) <= 1e-12);
  fft_radix2(b, true);
  for (int k = 0; k < n; ++k) CHECK(std::abs(b[k] - a[k]) <= 1e-13);
  std::vector<cdouble> bad(10);
  CHECK_THROWS(fft_radix2(bad, false));
}

TEST_CASE("contour construction from the domain") {
  const EigenvalueDomain d = EigenvalueDomain::disk({0.0, 1.0}, 0.5);
  const ContourGrid g = ContourGrid::build(d, 64, 0.2);
  CHECK(g.center_plus() == cdouble(0.0, 1.0));
  CHECK(g.radius() == doctest::Approx(0.7));
  CHECK(g.min_im_plus() == doctest::Approx(0.3));
  CHECK(g.total() == 128);
  CHECK(std::abs(g.length() - 4.0 * PI * 0.7) <= 1e-14 * g.length());
  // sum of |ds| equals the length
  double L = 0;
  for (const cdouble& w : g.ds()) L += std::abs(w);
  CHECK(std::abs(L - g.length()) <= 1e-12);

  // the rectangle whose circumscribed circle would dip below the axis
  const EigenvalueDomain rect = EigenvalueDomain::rectangle(-1, 1, 0.5, 1.5);
  CHECK_THROWS(ContourGrid::build(rect, 64, 0.1));

  CHECK_THROWS(ContourGrid::build(d, 48, 0.2));  // not a power of two
  CHECK_THROWS(ContourGrid::build(d, 8, 0.2));   // too few
  CHECK_THROWS(ContourGrid::build(d, 64, -0.1));
}

TEST_CASE("gamma- is the Schwarz reflection, both counterclockwise") {
  const EigenvalueDomain d = EigenvalueDomain::disk({0.3, 1.1}, 0.4);
  const ContourGrid g = ContourGrid::build(d, 32, 0.2);
  const int n = g.n();
  for (int j = 0; j < n; ++j) {
    const cdouble want = std::conj(g.center_plus()) + (g.nodes()[j] - g.center_plus());
    CHECK(std::abs(g.nodes()[n + j] - want) <= 1e-15);
  }
}

TEST_CASE("off-contour Cauchy transform") {
  const EigenvalueDomain d = EigenvalueDomain::disk({0.0, 1.0}, 0.5);
  const ContourGrid g = ContourGrid::build(d, 64, 0.25);
  const ContourDensity id = constant_density(g, Mat2::Identity());

  // inside gamma+ only: winding of gamma+ gives I
  const Mat2 inside = cauchy_offcontour(g, id, {0.1, 1.0});
  CHECK((inside - Mat2::Identity()).norm() <= 1e-13);
  // far outside both circles: 0
  const Mat2 outside = cauchy_offcontour(g, id, {4.0, 0.0});
  CHECK(outside.norm() <= 1e-13);
  // analytic test function h = (s - a) I on gamma+ only
  ContourDensity h;
  h.val.assign(g.total(), Mat2::Zero());
  for (int j = 0; j < g.n(); ++j)
    h.val[j] = (g.nodes()[j] - g.center_plus()) * Mat2::Identity();
  const cdouble z{0.2, 1.3};
  const Mat2 got = cauchy_offcontour(g, h, z);
  CHECK((got - (z - g.center_plus()) * Mat2::Identity()).norm() <= 1e-13);

  bool near = false;
  cauchy_offcontour(g, id, g.nodes()[3] + cdouble(1e-9, 0), &near);
  CHECK(near);
}

TEST_CASE("minus projector on elementary densities") {
  const EigenvalueDomain d = EigenvalueDomain::disk({0.0, 1.0}, 0.5);
  const ContourGrid g = ContourGrid::build(d, 64, 0.25);

  // constants have no negative frequencies and each circle is exterior to the other
  const ContourDensity c0 =
      cauchy_minus(g, constant_density(g, Mat2::Identity() * cdouble(2, 1)));
  CHECK(norm_linf(c0) <= 1e-13);

  // single negative mode on gamma+: C_-(u^{-1}) = -u^{-1} on its own circle
  const ContourDensity hm = mode_density(g, -1, true);
  const ContourDensity cm = cauchy_minus(g, hm);
  double worst = 0;
  for (int j = 0; j < g.n(); ++j) worst = std::max(worst, frob(cm.val[j] + hm.val[j]));
  CHECK(worst <= 1e-12);

  // positive mode: handled through the Plemelj identity
  const ContourDensity hp = mode_density(g, 1, true);
  const ContourDensity cp = cauchy_plus(g, hp);
  const ContourDensity cmp = cauchy_minus(g, hp);
  worst = 0;
  for (int j = 0; j < g.total(); ++j)
    worst = std::max(worst, frob(cp.val[j] - cmp.val[j] - hp.val[j]));
  CHECK(worst <= 1e-12);
}

TEST_CASE("discrete Plemelj identity for band-limited densities") {
  const EigenvalueDomain d = EigenvalueDomain::disk({0.0, 1.0}, 0.5);
  // 128 nodes so the smooth cross-circle coupling is resolved to 1e-12
  const ContourGrid g = ContourGrid::build(d, 128, 0.25);
  Rng rng(17);
  ContourDensity h;
  h.val.assign(g.total(), Mat2::Zero());
  for (int j = 0; j < g.total(); ++j) {
    const bool plus = g.on_plus(j);
    const cdouble c = plus ? g.center_plus() : std::conj(g.center_plus());
    const cdouble u = (g.nodes()[j] - c) / g.radius();
    Mat2 m = Mat2::Zero();
    for (int k = -15; k <= 15; ++k) {
      const cdouble coef{1.0 / (1 + k * k), 0.5 / (1 + std::abs(k))};
      m += coef * std::pow(u, k) * Mat2::Identity();
      m(0, 1) += coef * std::pow(u, k) * 0.3;
    }
    h.val[j] = m;
  }
  const ContourDensity cp = cauchy_plus(g, h);
  const ContourDensity cm = cauchy_minus(g, h);
  double worst = 0;
  for (int j = 0; j < g.total(); ++j)
    worst = std::max(worst, frob(cp.val[j] - cm.val[j] - h.val[j]));
  CHECK(worst <= 1e-12);

  // -C_- is a projector: C_-(C_- h) = -C_-(h)
  const ContourDensity cmm = cauchy_minus(g, cm);
  worst = 0;
  for (int j = 0; j < g.total(); ++j) worst = std::max(worst, frob(cmm.val[j] + cm.val[j]));
  CHECK(worst <= 1e-12);
  (void)rng;
}

TEST_CASE("norms") {
  const EigenvalueDomain d = EigenvalueDomain::disk({0.0, 1.0}, 0.5);
  const ContourGrid g = ContourGrid::build(d, 32, 0.25);
  Mat2 a;
  a << cdouble(1, 2), cdouble(0, -1), cdouble(3, 0), cdouble(-1, 1);
  const ContourDensity h = constant_density(g, a);
  CHECK(norm_linf(h) == doctest::Approx(frob(a)));
  CHECK(norm_l2(g, h) == doctest::Approx(frob(a) * std::sqrt(g.length())));
  CHECK(frob(a) == doctest::Approx(std::sqrt(1 + 4 + 1 + 9 + 1 + 1)));
}

TEST_CASE("off-contour value approaches the minus boundary value at first order") {
  // The plain trapezoid evaluator is only accurate at distances above the
  // node spacing (nearer evaluations raise the warning flag instead), so the
  // first-order approach to C_- is verified in the resolved regime.
  const EigenvalueDomain d = EigenvalueDomain::disk({0.0, 1.0}, 0.5);
  const ContourGrid g = ContourGrid::build(d, 256, 0.25);
  const ContourDensity h = mode_density(g, -2, true);
  const ContourDensity cm = cauchy_minus(g, h);
  const int j = 5;
  const cdouble xi = g.nodes()[j];
  const cdouble normal = (xi - g.center_plus()) / std::abs(xi - g.center_plus());
  std::vector<double> err;
  for (double dist : {0.2, 0.1, 0.05}) {
    bool near = false;
    const Mat2 off = cauchy_offcontour(g, h, xi + dist * g.radius() * normal, &near);
    CHECK(!near);
    err.push_back((off - cm.val[j]).norm());
  }
  // halving the distance halves the gap (first order in distance)
  CHECK(err[1] / err[0] == doctest::Approx(0.5).epsilon(0.25));
  CHECK(err[2] / err[1] == doctest::Approx(0.5).epsilon(0.25));
}
