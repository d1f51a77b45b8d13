#include "klshell/element.hpp"

namespace klshell {

void covariantSecondDerivative(const SurfaceShapes& sh, const double gamma[2][2][2], Mat2* out) {
  for (int i = 0; i < sh.count; ++i) {
    const double g1 = sh.dN(i, 0), g2 = sh.dN(i, 1);
    const double d11 = sh.d2N(i, 0) - gamma[0][0][0] * g1 - gamma[1][0][0] * g2;
    const double d22 = sh.d2N(i, 1) - gamma[0][1][1] * g1 - gamma[1][1][1] * g2;
    const double d12 = sh.d2N(i, 2) - gamma[0][0][1] * g1 - gamma[1][0][1] * g2;
    out[i] << d11, d12, d12, d22;
  }
}

PointEval evaluatePoint(const SurfaceShapes& sh, const NodeBlock& Xe, const NodeBlock& xe,
                        const KoiterMaterial& mat, Regime regime) {
  PointEval pe;
  const Vec3 A1 = Xe * sh.dN.col(0), A2 = Xe * sh.dN.col(1);
  const Vec3 D11 = Xe * sh.d2N.col(0), D22 = Xe * sh.d2N.col(1), D12 = Xe * sh.d2N.col(2);
  pe.ref = surfaceState(A1, A2, D11, D22, D12);

  if (regime == Regime::Nonlinear) {
    const Vec3 a1 = xe * sh.dN.col(0), a2 = xe * sh.dN.col(1);
    const Vec3 d11 = xe * sh.d2N.col(0), d22 = xe * sh.d2N.col(1), d12 = xe * sh.d2N.col(2);
    pe.cur = surfaceState(a1, a2, d11, d22, d12);
    pe.J = areaChange(pe.ref, pe.cur);
    pe.strain = strainsGreenLagrange(pe.ref, pe.cur);
  } else {
    pe.cur = pe.ref;
    pe.J = 1.0;
    const NodeBlock ue = xe - Xe;
    const Vec3 du[2] = {ue * sh.dN.col(0), ue * sh.dN.col(1)};
    const Vec3 d2u[3] = {ue * sh.d2N.col(0), ue * sh.d2N.col(1), ue * sh.d2N.col(2)};
    pe.strain = strainsLinear(pe.ref, du, d2u);
  }
  pe.stress = stressResultants(pe.strain, elasticityTensors(pe.ref.metricInv, mat), pe.J);
  return pe;
}

void accumulatePoint(const SurfaceShapes& sh, double gw, const NodeBlock& Xe, const NodeBlock& xe,
                     const KoiterMaterial& mat, ElementKind kind, Regime regime, Eigen::VectorXd* f,
                     Eigen::MatrixXd* k, double* energy) {
  const PointEval pe = evaluatePoint(sh, Xe, xe, mat, regime);
  const ElasticTensors ct = elasticityTensors(pe.ref.metricInv, mat);
  const double dA = pe.ref.jac * gw;
  const bool nl = (regime == Regime::Nonlinear);
  const int n = sh.count;

  if (kind != ElementKind::Bending) {
    // membrane: first derivatives only
    const Mat2& s = nl ? pe.stress.tau : pe.stress.sigma;  // integrand uses the Kirchhoff stress
    const SurfaceState& S = nl ? pe.cur : pe.ref;
    const Vec3 ab[2] = {S.a1, S.a2};

    if (f) {
      for (int i = 0; i < n; ++i) {
        const double t1 = sh.dN(i, 0) * s(0, 0) + sh.dN(i, 1) * s(1, 0);
        const double t2 = sh.dN(i, 0) * s(0, 1) + sh.dN(i, 1) * s(1, 1);
        f->segment<3>(3 * i) += dA * (t1 * ab[0] + t2 * ab[1]);
      }
    }
    if (k) {
      for (int b = 0; b < 2; ++b)
        for (int g = 0; g < 2; ++g) {
          const Mat3 outer = dA * (ab[b] * ab[g].transpose());
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
              double cij = 0;
              for (int a = 0; a < 2; ++a)
                for (int d = 0; d < 2; ++d) cij += ct.c(a, b, g, d) * sh.dN(i, a) * sh.dN(j, d);
              if (cij != 0.0) k->block<3, 3>(3 * i, 3 * j) += cij * outer;
            }
        }
      if (nl) {
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            double sij = 0;
            for (int a = 0; a < 2; ++a)
              for (int b = 0; b < 2; ++b) sij += sh.dN(i, a) * s(a, b) * sh.dN(j, b);
            sij *= dA;
            for (int c = 0; c < 3; ++c) (*k)(3 * i + c, 3 * j + c) += sij;
          }
      }
    }
    if (energy) *energy += 0.5 * dA * ct.c.quad(pe.strain.membrane, pe.strain.membrane);
  }

  if (kind != ElementKind::Membrane) {
    // bending: covariant second derivatives against the configuration that
    // carries the Christoffel symbols (current for nonlinear, reference else)
    const SurfaceState& S = nl ? pe.cur : pe.ref;
    const Mat2& M0 = nl ? pe.stress.M0 : pe.stress.M;
    Mat2 D[kMaxBasis];
    covariantSecondDerivative(sh, S.gamma, D);
    const Vec3& nrm = S.n;

    if (f) {
      for (int i = 0; i < n; ++i) {
        const double mi = (M0.array() * D[i].array()).sum();
        f->segment<3>(3 * i) += dA * mi * nrm;
      }
    }
    if (k) {
      const Mat3 nnT = dA * (nrm * nrm.transpose());
      Mat2 T[kMaxBasis];
      for (int i = 0; i < n; ++i) T[i] = ct.f.contract(D[i]);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double sij = (T[i].array() * D[j].array()).sum();
          k->block<3, 3>(3 * i, 3 * j) += sij * nnT;
        }
      if (nl) {
        const double w1 = -(M0.array() * S.curv.array()).sum();
        const Vec3 dual[2] = {S.dual(0), S.dual(1)};
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            double sij = 0;
            for (int g = 0; g < 2; ++g)
              for (int d = 0; d < 2; ++d)
                sij += S.metricInv(g, d) * sh.dN(i, g) * sh.dN(j, d);
            k->block<3, 3>(3 * i, 3 * j) += (w1 * sij) * nnT;
          }
        // kM2 and its transpose
        double mu[kMaxBasis];
        Vec3 v[kMaxBasis];
        for (int i = 0; i < n; ++i) {
          mu[i] = (M0.array() * D[i].array()).sum();
          v[i] = sh.dN(i, 0) * dual[0] + sh.dN(i, 1) * dual[1];
        }
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            k->block<3, 3>(3 * i, 3 * j) -=
                dA * (mu[j] * (nrm * v[i].transpose()) + mu[i] * (v[j] * nrm.transpose()));
          }
      }
    }
    if (energy) *energy += 0.5 * dA * ct.f.quad(pe.strain.bending, pe.strain.bending);
  }
}

}  // namespace klshell
