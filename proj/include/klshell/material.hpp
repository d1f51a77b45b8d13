#pragma once

#include "klshell/kinematics.hpp"
#include "klshell/types.hpp"

namespace klshell {

/// Koiter shell constitution with independently switchable membrane and
/// bending parts.
struct KoiterMaterial {
  double youngs = 1.0;
  double poisson = 0.0;  // in [0, 0.5)
  double thickness = 1.0;
  bool membraneOn = true;
  bool bendingOn = true;

  double shearStiffness() const { return youngs * thickness / (2.0 * (1.0 + poisson)); }
  double bulkStiffness() const { return 2.0 * shearStiffness() * poisson / (1.0 - poisson); }
};

/// Fourth-order surface tensor with full index access.
struct Tensor4 {
  double v[2][2][2][2] = {};
  double operator()(int a, int b, int g, int d) const { return v[a][b][g][d]; }

  Mat2 contract(const Mat2& e) const {
    Mat2 r = Mat2::Zero();
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int g = 0; g < 2; ++g)
          for (int d = 0; d < 2; ++d) r(a, b) += v[a][b][g][d] * e(g, d);
    return r;
  }
  double quad(const Mat2& x, const Mat2& y) const { return (contract(y).array() * x.array()).sum(); }
};

struct ElasticTensors {
  Tensor4 c;  // membrane stiffness
  Tensor4 f;  // bending stiffness = (T^2/12) * full membrane tensor
};

/// Isotropic tensors on the contravariant reference metric. Disabled parts
/// come back identically zero.
ElasticTensors elasticityTensors(const Mat2& metricInv, const KoiterMaterial& mat);

struct StressState {
  Mat2 tau;    // Kirchhoff membrane stress J*sigma
  Mat2 sigma;  // effective membrane stress
  Mat2 M0;     // Kirchhoff bending couple J*M
  Mat2 M;      // bending couple
};

/// Constitutive evaluation. The linear branch treats J as one; the nonlinear
/// branch throws on J <= 0 (inverted surface).
StressState stressResultants(const StrainState& strain, const ElasticTensors& ct, double J);

/// Physical (Cauchy) membrane stress N^ab = sigma^ab + M^ag b^b_g,
/// with bMixed(b,g) = b^b_g. Generally unsymmetric.
Mat2 cauchyMembrane(const Mat2& sigma, const Mat2& M, const Mat2& bMixed);

}  // namespace klshell
