#pragma once

#include "klshell/patch.hpp"
#include "klshell/types.hpp"

namespace klshell {

/// Pointwise first and second fundamental forms plus the derived quantities
/// needed by the shell integrands.
struct SurfaceState {
  Vec3 a1, a2;            // covariant tangents
  Vec3 d11, d22, d12;     // second parametric derivatives of the map
  Vec3 n;                 // unit normal a1 x a2 / |a1 x a2|
  Mat2 metric;            // a_ab
  Mat2 metricInv;         // a^ab
  Mat2 curv;              // b_ab = x_,ab . n
  double gamma[2][2][2];  // Christoffel symbols, gamma[g][a][b]
  double jac;             // |a1 x a2| = sqrt(det metric)

  Vec3 dual(int g) const { return metricInv(g, 0) * a1 + metricInv(g, 1) * a2; }
};

/// Builds the state from position derivatives. Throws on degenerate tangents.
SurfaceState surfaceState(const Vec3& a1, const Vec3& a2, const Vec3& d11, const Vec3& d22,
                          const Vec3& d12);
SurfaceState surfaceState(const NurbsPatch::Frame& f);

/// Local area change J = sqrt(det a / det A).
double areaChange(const SurfaceState& ref, const SurfaceState& cur);

struct StrainState {
  Mat2 membrane;  // eps_ab
  Mat2 bending;   // kappa_ab
  bool greenLagrange = true;
};

/// Green-Lagrange membrane strain and relative curvature of a configuration
/// pair evaluated at the same parametric point.
StrainState strainsGreenLagrange(const SurfaceState& ref, const SurfaceState& cur);

/// Infinitesimal strains from displacement derivatives against a reference
/// state. Second-derivative order is (11, 22, 12).
StrainState strainsLinear(const SurfaceState& ref, const Vec3 du[2], const Vec3 d2u[3]);

}  // namespace klshell
