#include "klshell/kinematics.hpp"

#include <cmath>
#include <stdexcept>

namespace klshell {

SurfaceState surfaceState(const Vec3& a1, const Vec3& a2, const Vec3& d11, const Vec3& d22,
                          const Vec3& d12) {
  SurfaceState s;
  s.a1 = a1;
  s.a2 = a2;
  s.d11 = d11;
  s.d22 = d22;
  s.d12 = d12;

  const Vec3 cr = a1.cross(a2);
  s.jac = cr.norm();
  if (s.jac < 1e-14 * a1.norm() * a2.norm())
    throw std::runtime_error("degenerate surface tangents");
  s.n = cr / s.jac;

  s.metric << a1.dot(a1), a1.dot(a2), a2.dot(a1), a2.dot(a2);
  const double det = s.metric.determinant();
  s.metricInv << s.metric(1, 1), -s.metric(0, 1), -s.metric(1, 0), s.metric(0, 0);
  s.metricInv /= det;

  s.curv << d11.dot(s.n), d12.dot(s.n), d12.dot(s.n), d22.dot(s.n);

  const Vec3 dual1 = s.dual(0), dual2 = s.dual(1);
  const Vec3* dd[2][2] = {{&s.d11, &s.d12}, {&s.d12, &s.d22}};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      s.gamma[0][a][b] = dd[a][b]->dot(dual1);
      s.gamma[1][a][b] = dd[a][b]->dot(dual2);
    }
  return s;
}

SurfaceState surfaceState(const NurbsPatch::Frame& f) {
  return surfaceState(f.a1, f.a2, f.d11, f.d22, f.d12);
}

double areaChange(const SurfaceState& ref, const SurfaceState& cur) {
  return cur.jac / ref.jac;
}

StrainState strainsGreenLagrange(const SurfaceState& ref, const SurfaceState& cur) {
  StrainState st;
  st.greenLagrange = true;
  st.membrane = 0.5 * (cur.metric - ref.metric);
  st.bending = cur.curv - ref.curv;
  return st;
}

StrainState strainsLinear(const SurfaceState& ref, const Vec3 du[2], const Vec3 d2u[3]) {
  StrainState st;
  st.greenLagrange = false;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const Vec3& A = (b == 0) ? ref.a1 : ref.a2;
      const Vec3& B = (a == 0) ? ref.a1 : ref.a2;
      st.membrane(a, b) = 0.5 * (du[a].dot(A) + du[b].dot(B));
    }
  const int second[2][2] = {{0, 2}, {2, 1}};  // (a,b) -> index into (11,22,12)
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      Vec3 v = d2u[second[a][b]];
      for (int g = 0; g < 2; ++g) v -= ref.gamma[g][a][b] * du[g];
      st.bending(a, b) = v.dot(ref.n);
    }
  return st;
}

}  // namespace klshell
