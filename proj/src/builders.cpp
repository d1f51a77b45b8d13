#include "klshell/builders.hpp"

#include <cmath>
#include <stdexcept>

namespace klshell {

namespace {

struct HomogeneousNet {
  int n1, n2;
  std::vector<Eigen::Vector4d> h;  // i + n1*j
  Eigen::Vector4d& at(int i, int j) { return h[i + n1 * j]; }
};

NurbsPatch fromHomogeneous(const KnotVector& ku, const KnotVector& kv, const HomogeneousNet& net) {
  std::vector<Vec3> pts(net.h.size());
  std::vector<double> wts(net.h.size());
  for (size_t k = 0; k < net.h.size(); ++k) {
    wts[k] = net.h[k][3];
    pts[k] = net.h[k].head<3>() / net.h[k][3];
  }
  return NurbsPatch(ku, kv, std::move(pts), std::move(wts));
}

// Homogeneous control points of a circular arc of opening angle < pi on the
// circle c + r (cos(phi) u + sin(phi) v).
std::array<Eigen::Vector4d, 3> arcControls(const Vec3& c, double r, const Vec3& u, const Vec3& v,
                                           double phi0, double phi1) {
  const double half = 0.5 * (phi1 - phi0);
  const double mid = 0.5 * (phi1 + phi0);
  const double w = std::cos(half);
  if (std::abs(half) >= M_PI / 2)
    throw std::invalid_argument("arc: opening angle must be below 180 degrees");
  const Vec3 p0 = c + r * (std::cos(phi0) * u + std::sin(phi0) * v);
  const Vec3 p2 = c + r * (std::cos(phi1) * u + std::sin(phi1) * v);
  const Vec3 pm = c + (r / w) * (std::cos(mid) * u + std::sin(mid) * v);
  return {Eigen::Vector4d(p0.x(), p0.y(), p0.z(), 1.0),
          Eigen::Vector4d(pm.x() * w, pm.y() * w, pm.z() * w, w),
          Eigen::Vector4d(p2.x(), p2.y(), p2.z(), 1.0)};
}

}  // namespace

NurbsPatch insertKnot(const NurbsPatch& patch, int dir, double value) {
  const KnotVector& kv = (dir == 0) ? patch.knots1() : patch.knots2();
  const int p = kv.degree();
  const std::vector<double>& U = kv.knots();
  const int span = kv.findSpan(value);

  std::vector<double> newU = U;
  newU.insert(newU.begin() + span + 1, value);

  const int n1 = patch.n1(), n2 = patch.n2();
  const int m1 = (dir == 0) ? n1 + 1 : n1;
  const int m2 = (dir == 0) ? n2 : n2 + 1;
  HomogeneousNet out{m1, m2, std::vector<Eigen::Vector4d>(static_cast<size_t>(m1) * m2)};

  const int lines = (dir == 0) ? n2 : n1;
  const int nOld = (dir == 0) ? n1 : n2;
  for (int line = 0; line < lines; ++line) {
    auto oldAt = [&](int k) {
      return patch.homogeneous(dir == 0 ? patch.nodeId(k, line) : patch.nodeId(line, k));
    };
    auto newAt = [&](int k) -> Eigen::Vector4d& {
      return (dir == 0) ? out.at(k, line) : out.at(line, k);
    };
    for (int k = 0; k <= span - p; ++k) newAt(k) = oldAt(k);
    for (int k = span - p + 1; k <= span; ++k) {
      const double alpha = (value - U[k]) / (U[k + p] - U[k]);
      newAt(k) = alpha * oldAt(k) + (1.0 - alpha) * oldAt(k - 1);
    }
    for (int k = span + 1; k <= nOld; ++k) newAt(k) = oldAt(k - 1);
  }

  KnotVector nk(p, newU);
  return (dir == 0) ? fromHomogeneous(nk, patch.knots2(), out)
                    : fromHomogeneous(patch.knots1(), nk, out);
}

NurbsPatch refineUniform(const NurbsPatch& patch, int dir, int spans) {
  NurbsPatch cur = patch;
  const double a = (dir == 0) ? patch.knots1().front() : patch.knots2().front();
  const double b = (dir == 0) ? patch.knots1().back() : patch.knots2().back();
  for (int i = 1; i < spans; ++i) {
    const double t = a + (b - a) * i / spans;
    const auto& brk = (dir == 0) ? cur.knots1().breakpoints() : cur.knots2().breakpoints();
    bool present = false;
    for (double v : brk) present = present || v == t;
    if (!present) cur = insertKnot(cur, dir, t);
  }
  const auto& kv = (dir == 0) ? cur.knots1() : cur.knots2();
  if (kv.spanCount() != spans)
    throw std::runtime_error("uniform refinement produced an unexpected span count");
  return cur;
}

namespace {

// One Bezier elevation step applied to the single-span direction.
NurbsPatch bezierElevateOnce(const NurbsPatch& patch, int dir) {
  const KnotVector& kv = (dir == 0) ? patch.knots1() : patch.knots2();
  const int p = kv.degree();
  const int n1 = patch.n1(), n2 = patch.n2();
  const int m1 = (dir == 0) ? n1 + 1 : n1;
  const int m2 = (dir == 0) ? n2 : n2 + 1;
  HomogeneousNet out{m1, m2, std::vector<Eigen::Vector4d>(static_cast<size_t>(m1) * m2)};

  const int lines = (dir == 0) ? n2 : n1;
  for (int line = 0; line < lines; ++line) {
    auto oldAt = [&](int k) {
      return patch.homogeneous(dir == 0 ? patch.nodeId(k, line) : patch.nodeId(line, k));
    };
    auto newAt = [&](int k) -> Eigen::Vector4d& {
      return (dir == 0) ? out.at(k, line) : out.at(line, k);
    };
    newAt(0) = oldAt(0);
    newAt(p + 1) = oldAt(p);
    for (int k = 1; k <= p; ++k) {
      const double a = static_cast<double>(k) / (p + 1);
      newAt(k) = a * oldAt(k - 1) + (1.0 - a) * oldAt(k);
    }
  }

  std::vector<double> U;
  for (int i = 0; i <= p + 1; ++i) U.push_back(kv.front());
  for (int i = 0; i <= p + 1; ++i) U.push_back(kv.back());
  KnotVector nk(p + 1, U);
  return (dir == 0) ? fromHomogeneous(nk, patch.knots2(), out)
                    : fromHomogeneous(patch.knots1(), nk, out);
}

// Elevation of a multi-span direction by collocation at the Greville points
// of the elevated space. The elevated space contains the original surface, so
// interpolation reproduces it up to roundoff.
NurbsPatch collocationElevate(const NurbsPatch& patch, int dir, int pTarget) {
  const KnotVector& kv = (dir == 0) ? patch.knots1() : patch.knots2();
  const int raise = pTarget - kv.degree();

  // elevated knot vector: every distinct knot gains `raise` multiplicity
  std::vector<double> U;
  double prev = kv.knots().front();
  size_t idx = 0;
  while (idx < kv.knots().size()) {
    double v = kv.knots()[idx];
    size_t mult = 0;
    while (idx < kv.knots().size() && kv.knots()[idx] == v) {
      ++idx;
      ++mult;
    }
    for (size_t r = 0; r < mult + raise; ++r) U.push_back(v);
    prev = v;
  }
  (void)prev;
  KnotVector nk(pTarget, U);
  const int nNew = nk.nodeCount();

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nNew, nNew);
  std::vector<double> grev(nNew);
  for (int i = 0; i < nNew; ++i) {
    grev[i] = nk.greville(i);
    const auto b = nk.evaluate(grev[i]);
    for (int k = 0; k <= pTarget; ++k) A(i, b.first + k) = b.N[k];
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);

  const int n1 = patch.n1(), n2 = patch.n2();
  const int m1 = (dir == 0) ? nNew : n1;
  const int m2 = (dir == 0) ? n2 : nNew;
  HomogeneousNet out{m1, m2, std::vector<Eigen::Vector4d>(static_cast<size_t>(m1) * m2)};

  const KnotVector& other = (dir == 0) ? patch.knots2() : patch.knots1();
  const int lines = other.nodeCount();
  const int p = kv.degree();
  for (int line = 0; line < lines; ++line) {
    // homogeneous curve values of this control line at the collocation points
    Eigen::MatrixXd rhs(nNew, 4);
    for (int i = 0; i < nNew; ++i) {
      const auto b = kv.evaluate(grev[i]);
      Eigen::Vector4d s = Eigen::Vector4d::Zero();
      for (int k = 0; k <= p; ++k) {
        const int id = (dir == 0) ? patch.nodeId(b.first + k, line)
                                  : patch.nodeId(line, b.first + k);
        s += b.N[k] * patch.homogeneous(id);
      }
      rhs.row(i) = s.transpose();
    }
    Eigen::MatrixXd sol = lu.solve(rhs);
    for (int k = 0; k < nNew; ++k) {
      Eigen::Vector4d& dst = (dir == 0) ? out.at(k, line) : out.at(line, k);
      dst = sol.row(k).transpose();
    }
  }
  return (dir == 0) ? fromHomogeneous(nk, patch.knots2(), out)
                    : fromHomogeneous(patch.knots1(), nk, out);
}

NurbsPatch elevateDirection(const NurbsPatch& patch, int dir, int pTarget) {
  const KnotVector& kv = (dir == 0) ? patch.knots1() : patch.knots2();
  if (pTarget == kv.degree()) return patch;
  if (kv.spanCount() == 1) {
    NurbsPatch cur = patch;
    for (int p = kv.degree(); p < pTarget; ++p) cur = bezierElevateOnce(cur, dir);
    return cur;
  }
  return collocationElevate(patch, dir, pTarget);
}

}  // namespace

NurbsPatch degreeElevate(const NurbsPatch& patch, int pTarget) {
  if (pTarget < patch.knots1().degree() || pTarget < patch.knots2().degree())
    throw std::invalid_argument("degree elevation: target below current degree");
  NurbsPatch cur = elevateDirection(patch, 0, pTarget);
  return elevateDirection(cur, 1, pTarget);
}

NurbsPatch makeCantilever(double R, double L, int m, int p) {
  if (m < 1 || p < 2) throw std::invalid_argument("cantilever mesh: need m >= 1 and p >= 2");

  // quarter arc from e3 (clamped end) to e1 (tip), translated along e2
  const auto arc = arcControls(Vec3::Zero(), R, Vec3::UnitZ(), Vec3::UnitX(), 0.0, M_PI / 2);
  HomogeneousNet net{3, 3, std::vector<Eigen::Vector4d>(9)};
  for (int j = 0; j < 3; ++j) {
    const double y = 0.5 * L * j;
    for (int i = 0; i < 3; ++i) {
      Eigen::Vector4d h = arc[i];
      h[1] += y * h[3];  // translate, homogeneous
      net.at(i, j) = h;
    }
  }
  NurbsPatch patch = fromHomogeneous(KnotVector::uniform(2, 1), KnotVector::uniform(2, 1), net);
  patch = degreeElevate(patch, p);
  return refineUniform(patch, 0, m);
}

NurbsPatch makeScordelis(int m, int p) {
  if (m < 2) throw std::invalid_argument("roof mesh: need m >= 2");
  if (m % 2 != 0)
    throw std::invalid_argument("roof mesh: 1.5*m must be integral, use an even m");
  const double R = 25.0, L = 50.0;
  const double phi = 40.0 * M_PI / 180.0;

  const auto arc = arcControls(Vec3::Zero(), R, Vec3::UnitZ(), Vec3::UnitX(), -phi, phi);
  HomogeneousNet net{3, 3, std::vector<Eigen::Vector4d>(9)};
  for (int j = 0; j < 3; ++j) {
    const double y = 0.5 * L * j;
    for (int i = 0; i < 3; ++i) {
      Eigen::Vector4d h = arc[i];
      h[1] += y * h[3];
      net.at(i, j) = h;
    }
  }
  NurbsPatch patch = fromHomogeneous(KnotVector::uniform(2, 1), KnotVector::uniform(2, 1), net);
  patch = degreeElevate(patch, p);
  patch = refineUniform(patch, 0, m);
  return refineUniform(patch, 1, 3 * m / 2);
}

NurbsPatch makeHemisphere(int m, int p) {
  if (m < 2) throw std::invalid_argument("hemisphere mesh: need m >= 2");
  const double R = 10.0;
  const double hole = 18.0 * M_PI / 180.0;

  // Profile: meridian arc in the (e1,e3) plane from the equator up to the
  // hole edge; revolved by 90 degrees about e3. Direction 2 runs from the
  // equator towards the hole so that the normal points outward.
  const auto prof =
      arcControls(Vec3::Zero(), R, Vec3::UnitZ(), Vec3::UnitX(), M_PI / 2, hole);
  const auto sweep =
      arcControls(Vec3::Zero(), 1.0, Vec3::UnitX(), Vec3::UnitY(), 0.0, M_PI / 2);

  HomogeneousNet net{3, 3, std::vector<Eigen::Vector4d>(9)};
  for (int j = 0; j < 3; ++j) {
    const double xr = prof[j][0] / prof[j][3];  // profile radius from the axis
    const double z = prof[j][2] / prof[j][3];
    for (int i = 0; i < 3; ++i) {
      const double c1 = sweep[i][0] / sweep[i][3];
      const double c2 = sweep[i][1] / sweep[i][3];
      const double w = sweep[i][3] * prof[j][3];
      net.at(i, j) = Eigen::Vector4d(xr * c1 * w, xr * c2 * w, z * w, w);
    }
  }
  NurbsPatch patch = fromHomogeneous(KnotVector::uniform(2, 1), KnotVector::uniform(2, 1), net);
  patch = degreeElevate(patch, p);
  patch = refineUniform(patch, 0, m);
  return refineUniform(patch, 1, m);
}

void applySkew(NurbsPatch& patch) {
  double xmax = 0.0, ymax = 0.0;
  for (const Vec3& pt : patch.points()) {
    xmax = std::max(xmax, std::abs(pt.x()));
    ymax = std::max(ymax, pt.y());
  }
  for (Vec3& pt : patch.points())
    pt.y() += 5.0 * std::sin(M_PI * pt.x() / (2.0 * xmax)) * std::sin(M_PI * pt.y() / ymax);
}

}  // namespace klshell
