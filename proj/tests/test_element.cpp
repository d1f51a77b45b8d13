#include <doctest.h>

#include <random>

#include "klshell/builders.hpp"
#include "klshell/element.hpp"

using namespace klshell;

namespace {

// quadrature-loop wrapper around a single patch element
struct SingleElement {
  NurbsPatch patch;
  NodeBlock Xe;
  int n;

  explicit SingleElement(NurbsPatch p) : patch(std::move(p)) {
    n = patch.nodeCount();
    Xe.resize(3, n);
    for (int k = 0; k < n; ++k) Xe.col(k) = patch.point(k);
  }

  void integrate(const NodeBlock& xe, const KoiterMaterial& mat, ElementKind kind, Regime regime,
                 Eigen::VectorXd* f, Eigen::MatrixXd* k, double* energy) const {
    const int p1 = patch.knots1().degree(), p2 = patch.knots2().degree();
    const GaussRule& g1 = gaussRule(p1 + 1);
    const GaussRule& g2 = gaussRule(p2 + 1);
    if (f) f->setZero(3 * n);
    if (k) k->setZero(3 * n, 3 * n);
    if (energy) *energy = 0;
    for (size_t q2 = 0; q2 < g2.points.size(); ++q2)
      for (size_t q1 = 0; q1 < g1.points.size(); ++q1) {
        const double xi = 0.5 + 0.5 * g1.points[q1];
        const double eta = 0.5 + 0.5 * g2.points[q2];
        SurfaceShapes sh = patch.shapes(xi, eta);
        sh.dN *= 0.5;
        sh.d2N *= 0.25;
        accumulatePoint(sh, g1.weights[q1] * g2.weights[q2], Xe, xe, mat, kind, regime, f, k,
                        energy);
      }
  }

  NodeBlock perturbed(unsigned seed, double scale) const {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss;
    NodeBlock xe = Xe;
    for (int k = 0; k < n; ++k) xe.col(k) += scale * Vec3(gauss(rng), gauss(rng), gauss(rng));
    return xe;
  }
};

}  // namespace

TEST_SUITE("element") {

TEST_CASE("covariant second derivative identities") {
  const NurbsPatch patch = makeHemisphere(3, 2);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const SurfaceShapes sh = patch.shapes(unif(rng), unif(rng));
    NodeBlock xe(3, sh.count);
    for (int k = 0; k < sh.count; ++k) xe.col(k) = patch.point(sh.nodes[k]);
    const PointEval pe = evaluatePoint(sh, xe, xe, KoiterMaterial{1, 0, 1}, Regime::Nonlinear);

    Mat2 D[kMaxBasis];
    covariantSecondDerivative(sh, pe.cur.gamma, D);
    // contraction with nodal positions, dotted with the normal, equals b
    Mat2 b = Mat2::Zero();
    for (int a = 0; a < 2; ++a)
      for (int bb = 0; bb < 2; ++bb) {
        Vec3 v = Vec3::Zero();
        for (int k = 0; k < sh.count; ++k) v += D[k](a, bb) * xe.col(k);
        b(a, bb) = v.dot(pe.cur.n);
      }
    CHECK((b - pe.cur.curv).norm() < 1e-12 * (1.0 + pe.cur.curv.norm()));
    // partition of unity kills the sum over nodes
    Mat2 sum = Mat2::Zero();
    for (int k = 0; k < sh.count; ++k) sum += D[k];
    CHECK(sum.norm() < 1e-9);
  }
}

TEST_CASE("flat plate: covariant derivative reduces to plain second derivatives") {
  SurfaceShapes sh;
  bilinearShapes(0.3, -0.4, sh);
  const double gamma[2][2][2] = {};
  Mat2 D[4];
  covariantSecondDerivative(sh, gamma, D);
  for (int k = 0; k < 4; ++k) {
    CHECK(D[k](0, 0) == sh.d2N(k, 0));
    CHECK(D[k](1, 1) == sh.d2N(k, 1));
    CHECK(D[k](0, 1) == sh.d2N(k, 2));
  }
}

TEST_CASE("zero stress and rigid translations give zero internal force") {
  const SingleElement el(makeCantilever(10.0, 1.0, 1, 2));
  const KoiterMaterial mat{1e7, 0.0, 0.01};
  Eigen::VectorXd f;
  el.integrate(el.Xe, mat, ElementKind::Full, Regime::Nonlinear, &f, nullptr, nullptr);
  CHECK(f.norm() == 0.0);

  NodeBlock xe = el.Xe;
  xe.colwise() += Vec3(0.3, -0.2, 0.9);
  el.integrate(xe, mat, ElementKind::Full, Regime::Nonlinear, &f, nullptr, nullptr);
  CHECK(f.norm() < 1e-12 * mat.youngs * mat.thickness);
}

TEST_CASE("internal force is the gradient of the element energy") {
  const SingleElement el(makeCantilever(10.0, 1.0, 1, 2));
  const KoiterMaterial mat{1e4, 0.0, 0.05};
  const NodeBlock xe = el.perturbed(41, 0.05);

  for (ElementKind kind : {ElementKind::Membrane, ElementKind::Bending, ElementKind::Full}) {
    Eigen::VectorXd f;
    el.integrate(xe, mat, kind, Regime::Nonlinear, &f, nullptr, nullptr);
    const double h = 1e-6 * 10.0;
    double fnorm = f.norm();
    REQUIRE(fnorm > 0);
    for (int dof = 0; dof < 3 * el.n; dof += 5) {
      NodeBlock xp = xe, xm = xe;
      xp(dof % 3, dof / 3) += h;
      xm(dof % 3, dof / 3) -= h;
      double ep, em;
      el.integrate(xp, mat, kind, Regime::Nonlinear, nullptr, nullptr, &ep);
      el.integrate(xm, mat, kind, Regime::Nonlinear, nullptr, nullptr, &em);
      CHECK(std::abs((ep - em) / (2 * h) - f[dof]) < 1e-6 * fnorm);
    }
  }
}

TEST_CASE("tangent matches the finite-difference force Jacobian") {
  const SingleElement el(makeCantilever(10.0, 1.0, 1, 2));
  const KoiterMaterial mat{1e4, 0.0, 0.05};
  const NodeBlock xe = el.perturbed(17, 0.03);

  for (ElementKind kind : {ElementKind::Membrane, ElementKind::Bending, ElementKind::Full}) {
    Eigen::VectorXd f;
    Eigen::MatrixXd k;
    el.integrate(xe, mat, kind, Regime::Nonlinear, &f, &k, nullptr);
    CHECK((k - k.transpose()).norm() < 1e-12 * k.norm());

    const double h = 1e-6 * 10.0;
    Eigen::MatrixXd fd(3 * el.n, 3 * el.n);
    for (int dof = 0; dof < 3 * el.n; ++dof) {
      NodeBlock xp = xe, xm = xe;
      xp(dof % 3, dof / 3) += h;
      xm(dof % 3, dof / 3) -= h;
      Eigen::VectorXd fp, fm;
      el.integrate(xp, mat, kind, Regime::Nonlinear, &fp, nullptr, nullptr);
      el.integrate(xm, mat, kind, Regime::Nonlinear, &fm, nullptr, nullptr);
      fd.col(dof) = (fp - fm) / (2 * h);
    }
    CHECK((fd - k).norm() < 1e-5 * k.norm());
  }
}

TEST_CASE("linear mode has no geometric stiffness") {
  const SingleElement el(makeCantilever(10.0, 1.0, 1, 2));
  const KoiterMaterial mat{1e4, 0.0, 0.05};
  Eigen::MatrixXd k0, k1;
  el.integrate(el.Xe, mat, ElementKind::Full, Regime::Linear, nullptr, &k0, nullptr);
  el.integrate(el.perturbed(5, 0.1), mat, ElementKind::Full, Regime::Linear, nullptr, &k1,
               nullptr);
  CHECK((k0 - k1).norm() < 1e-14 * k0.norm());  // stiffness blind to the state
  CHECK((k0 - k0.transpose()).norm() < 1e-12 * k0.norm());
}

TEST_CASE("linear force is consistent with the linear stiffness") {
  const SingleElement el(makeCantilever(25.0, 50.0, 1, 2));
  const KoiterMaterial mat{4.32, 0.0, 0.25};
  const NodeBlock xe = el.perturbed(29, 1e-3);
  Eigen::VectorXd f;
  Eigen::MatrixXd k;
  el.integrate(xe, mat, ElementKind::Full, Regime::Linear, &f, &k, nullptr);
  Eigen::VectorXd u(3 * el.n);
  for (int kk = 0; kk < el.n; ++kk) u.segment<3>(3 * kk) = xe.col(kk) - el.Xe.col(kk);
  CHECK((f - k * u).norm() < 1e-12 * f.norm());
}

TEST_CASE("membrane elements ignore the bending tensor and vice versa") {
  const SingleElement el(makeCantilever(10.0, 1.0, 1, 2));
  KoiterMaterial mat{1e4, 0.0, 0.05};
  const NodeBlock xe = el.perturbed(61, 0.02);

  Eigen::VectorXd fm1, fm2, fb1, fb2;
  Eigen::MatrixXd km1, km2, kb1, kb2;
  el.integrate(xe, mat, ElementKind::Membrane, Regime::Nonlinear, &fm1, &km1, nullptr);
  el.integrate(xe, mat, ElementKind::Bending, Regime::Nonlinear, &fb1, &kb1, nullptr);
  mat.bendingOn = false;  // junk the unused tensor
  el.integrate(xe, mat, ElementKind::Membrane, Regime::Nonlinear, &fm2, &km2, nullptr);
  CHECK((fm1 - fm2).norm() == 0.0);
  CHECK((km1 - km2).norm() == 0.0);
  mat.bendingOn = true;
  mat.membraneOn = false;
  el.integrate(xe, mat, ElementKind::Bending, Regime::Nonlinear, &fb2, &kb2, nullptr);
  CHECK((fb1 - fb2).norm() == 0.0);
  CHECK((kb1 - kb2).norm() == 0.0);

  // full element splits into the two parts
  mat.membraneOn = true;
  Eigen::VectorXd ff;
  Eigen::MatrixXd kf;
  el.integrate(xe, mat, ElementKind::Full, Regime::Nonlinear, &ff, &kf, nullptr);
  CHECK((ff - fm1 - fb1).norm() < 1e-12 * ff.norm());
  CHECK((kf - km1 - kb1).norm() < 1e-12 * kf.norm());
}

}  // TEST_SUITE
