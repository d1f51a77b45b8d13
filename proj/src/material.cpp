#include "klshell/material.hpp"

#include <stdexcept>

namespace klshell {

ElasticTensors elasticityTensors(const Mat2& Ai, const KoiterMaterial& mat) {
  const double mu = mat.shearStiffness();
  const double lam = mat.bulkStiffness();
  ElasticTensors ct;
  Tensor4 full;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int g = 0; g < 2; ++g)
        for (int d = 0; d < 2; ++d)
          full.v[a][b][g][d] =
              lam * (Ai(a, b) * Ai(g, d)) + mu * (Ai(a, g) * Ai(b, d) + Ai(a, d) * Ai(b, g));
  const double bend = mat.thickness * mat.thickness / 12.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int g = 0; g < 2; ++g)
        for (int d = 0; d < 2; ++d) {
          ct.c.v[a][b][g][d] = mat.membraneOn ? full.v[a][b][g][d] : 0.0;
          ct.f.v[a][b][g][d] = mat.bendingOn ? bend * full.v[a][b][g][d] : 0.0;
        }
  return ct;
}

StressState stressResultants(const StrainState& strain, const ElasticTensors& ct, double J) {
  StressState s;
  if (strain.greenLagrange) {
    if (J <= 0.0) throw std::runtime_error("inverted surface: nonpositive area change");
    s.tau = ct.c.contract(strain.membrane);
    s.M0 = ct.f.contract(strain.bending);
    s.sigma = s.tau / J;
    s.M = s.M0 / J;
  } else {
    s.sigma = ct.c.contract(strain.membrane);
    s.M = ct.f.contract(strain.bending);
    s.tau = s.sigma;
    s.M0 = s.M;
  }
  return s;
}

Mat2 cauchyMembrane(const Mat2& sigma, const Mat2& M, const Mat2& bMixed) {
  return sigma + M * bMixed.transpose();
}

}  // namespace klshell
