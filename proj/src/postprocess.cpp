#include "klshell/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace klshell {

Mat2 physicalFrame(const SurfaceState& s) {
  const Vec3 e1 = s.a1.normalized();
  const Vec3 e2 = (s.a2 - s.a2.dot(e1) * e1).normalized();
  Mat2 f;
  f << e1.dot(s.a1), e1.dot(s.a2), e2.dot(s.a1), e2.dot(s.a2);
  return f;
}

Vec3 displacementAt(const NurbsPatch& patch, const Eigen::VectorXd& u, double xi1, double xi2) {
  const SurfaceShapes sh = patch.shapes(xi1, xi2);
  Vec3 out = Vec3::Zero();
  for (int k = 0; k < sh.count; ++k) out += sh.N[k] * u.segment<3>(3 * sh.nodes[k]);
  return out;
}

Recovery::Recovery(const ShellModel& model, const Eigen::VectorXd& u, Regime regime)
    : model_(model), u_(u), regime_(regime) {
  const NurbsPatch& p = model.mesh().patch;
  grev1_.resize(p.n1());
  grev2_.resize(p.n2());
  for (int i = 0; i < p.n1(); ++i) grev1_[i] = p.knots1().greville(i);
  for (int j = 0; j < p.n2(); ++j) grev2_[j] = p.knots2().greville(j);
}

Recovery::MembranePoint Recovery::membraneAt(int m1elem, double s, double t) const {
  const auto& mes = model_.membraneElements();
  if (mes.empty()) throw std::logic_error("membrane sampling requires a B2M1 discretization");
  const auto& me = mes[m1elem];
  const int next = static_cast<int>(me.ext.size());
  Eigen::Matrix3Xd Uext(3, next);
  for (int i = 0; i < next; ++i) Uext.col(i) = u_.segment<3>(3 * me.ext[i]);
  const NodeBlock Xe = me.Xr;
  const NodeBlock xe = me.Xr + Uext * me.P;

  SurfaceShapes sh;
  bilinearShapes(s, t, sh);
  const PointEval pe = evaluatePoint(sh, Xe, xe, model_.material(), regime_);

  MembranePoint out;
  out.state = (regime_ == Regime::Nonlinear) ? pe.cur : pe.ref;
  const Mat2 F = physicalFrame(out.state);
  out.sigmaPhys = F * pe.stress.sigma * F.transpose();
  out.x = Vec3::Zero();
  out.u = Vec3::Zero();
  for (int k = 0; k < 4; ++k) {
    out.x += sh.N[k] * Xe.col(k);
    out.u += sh.N[k] * (xe.col(k) - Xe.col(k));
  }
  return out;
}

Recovery::PatchPoint Recovery::patchFromShapes(const SurfaceShapes& sh) const {
  const NurbsPatch& patch = model_.mesh().patch;
  const int n = sh.count;
  NodeBlock Xe(3, n), xe(3, n);
  for (int k = 0; k < n; ++k) {
    Xe.col(k) = patch.point(sh.nodes[k]);
    xe.col(k) = Xe.col(k) + u_.segment<3>(3 * sh.nodes[k]);
  }
  const PointEval pe = evaluatePoint(sh, Xe, xe, model_.material(), regime_);
  const SurfaceState& S = (regime_ == Regime::Nonlinear) ? pe.cur : pe.ref;
  const Mat2 F = physicalFrame(S);
  const Mat2 bMixed = S.metricInv * S.curv;

  PatchPoint out;
  out.couplePhys = F * pe.stress.M * F.transpose();
  out.sigmaPhys = F * pe.stress.sigma * F.transpose();
  out.momentTermPhys = F * (pe.stress.M * bMixed.transpose()) * F.transpose();
  out.x = Xe * sh.N;
  out.u = (xe - Xe) * sh.N;
  return out;
}

Recovery::PatchPoint Recovery::patchAt(double xi1, double xi2) const {
  return patchFromShapes(model_.mesh().patch.shapes(xi1, xi2));
}

Recovery::PatchPoint Recovery::patchAtInSpan(double xi1, double xi2, int span1, int span2) const {
  return patchFromShapes(model_.mesh().patch.shapesInSpan(xi1, xi2, span1, span2));
}

M1Point Recovery::projectToM1(double xi1, double xi2) const {
  const NurbsPatch& patch = model_.mesh().patch;
  const auto& mes = model_.membraneElements();
  const M1Mesh& m1 = model_.mesh().m1;
  if (mes.empty()) throw std::logic_error("projection requires a B2M1 discretization");

  const NurbsPatch::Frame f = patch.frame(xi1, xi2);
  const SurfaceState base = surfaceState(f);
  const Vec3 xB = f.x;
  const Vec3 nB = base.n;

  // seed cell from the Greville grid
  auto cell = [](const std::vector<double>& g, double v) {
    const auto it = std::upper_bound(g.begin(), g.end(), v);
    return std::clamp(static_cast<int>(it - g.begin()) - 1, 0, static_cast<int>(g.size()) - 2);
  };
  const int i0 = cell(grev1_, xi1);
  const int j0 = cell(grev2_, xi2);

  // candidate elements in ascending id, growing rings around the seed
  std::vector<int> cands;
  for (int ring = 0; ring <= 2; ++ring) {
    std::vector<int> level;
    for (int dj = -ring; dj <= ring; ++dj)
      for (int di = -ring; di <= ring; ++di) {
        if (std::max(std::abs(di), std::abs(dj)) != ring) continue;
        const int i = i0 + di, j = j0 + dj;
        if (i < 0 || j < 0 || i >= m1.ne1 || j >= m1.ne2) continue;
        level.push_back(i + m1.ne1 * j);
      }
    std::sort(level.begin(), level.end());
    cands.insert(cands.end(), level.begin(), level.end());
  }

  for (int e : cands) {
    const auto& me = mes[e];
    // Newton on P(s,t) - xB - d nB = 0 over the reference facet
    double s = 0, t = 0, d = 0;
    bool ok = false;
    for (int it = 0; it < 60; ++it) {
      SurfaceShapes sh;
      bilinearShapes(s, t, sh);
      Vec3 pos = Vec3::Zero(), a1 = Vec3::Zero(), a2 = Vec3::Zero();
      for (int k = 0; k < 4; ++k) {
        pos += sh.N[k] * me.Xr.col(k);
        a1 += sh.dN(k, 0) * me.Xr.col(k);
        a2 += sh.dN(k, 1) * me.Xr.col(k);
      }
      const Vec3 res = pos - xB - d * nB;
      Mat3 J;
      J.col(0) = a1;
      J.col(1) = a2;
      J.col(2) = -nB;
      const Vec3 delta = J.partialPivLu().solve(res);
      s -= delta[0];
      t -= delta[1];
      d -= delta[2];
      if (delta.head<2>().norm() < 1e-12) {
        ok = true;
        break;
      }
      if (std::abs(s) > 3 || std::abs(t) > 3) break;  // diverging, try next element
    }
    if (ok && std::abs(s) <= 1.0 + 1e-9 && std::abs(t) <= 1.0 + 1e-9)
      return {e, std::clamp(s, -1.0, 1.0), std::clamp(t, -1.0, 1.0)};
  }
  throw std::runtime_error("normal projection onto the membrane mesh failed");
}

std::vector<FieldSample> Recovery::rawMembrane(int grid) const {
  std::vector<FieldSample> out;
  const bool hybrid = model_.mesh().disc == Disc::B2M1;
  if (hybrid) {
    const int ne = static_cast<int>(model_.membraneElements().size());
    out.reserve(static_cast<size_t>(ne) * grid * grid);
    for (int e = 0; e < ne; ++e)
      for (int gj = 0; gj < grid; ++gj)
        for (int gi = 0; gi < grid; ++gi) {
          const double s = -1.0 + 2.0 * gi / (grid - 1);
          const double t = -1.0 + 2.0 * gj / (grid - 1);
          const MembranePoint mp = membraneAt(e, s, t);
          FieldSample fs;
          fs.elem = e;
          fs.xi1 = s;
          fs.xi2 = t;
          fs.x = mp.x;
          fs.u = mp.u;
          fs.sigma = mp.sigmaPhys;
          fs.surface = 1;
          out.push_back(fs);
        }
    return out;
  }
  const auto& pes = model_.patchElements();
  for (size_t e = 0; e < pes.size(); ++e)
    for (int gj = 0; gj < grid; ++gj)
      for (int gi = 0; gi < grid; ++gi) {
        const double xi = pes[e].u0 + (pes[e].u1 - pes[e].u0) * gi / (grid - 1);
        const double eta = pes[e].v0 + (pes[e].v1 - pes[e].v0) * gj / (grid - 1);
        const PatchPoint pp = patchAt(xi, eta);
        FieldSample fs;
        fs.elem = static_cast<int>(e);
        fs.xi1 = xi;
        fs.xi2 = eta;
        fs.x = pp.x;
        fs.u = pp.u;
        fs.sigma = pp.sigmaPhys;
        fs.couple = pp.couplePhys;
        fs.cauchy = pp.sigmaPhys + pp.momentTermPhys;
        out.push_back(fs);
      }
  return out;
}

std::vector<FieldSample> Recovery::rawBending(int grid) const {
  std::vector<FieldSample> out;
  const auto& pes = model_.patchElements();
  for (size_t e = 0; e < pes.size(); ++e)
    for (int gj = 0; gj < grid; ++gj)
      for (int gi = 0; gi < grid; ++gi) {
        const double xi = pes[e].u0 + (pes[e].u1 - pes[e].u0) * gi / (grid - 1);
        const double eta = pes[e].v0 + (pes[e].v1 - pes[e].v0) * gj / (grid - 1);
        const PatchPoint pp = patchAt(xi, eta);
        FieldSample fs;
        fs.elem = static_cast<int>(e);
        fs.xi1 = xi;
        fs.xi2 = eta;
        fs.x = pp.x;
        fs.u = pp.u;
        fs.couple = pp.couplePhys;
        out.push_back(fs);
      }
  return out;
}

std::vector<FieldSample> Recovery::rawCauchy(int grid) const {
  const bool hybrid = model_.mesh().disc == Disc::B2M1;
  std::vector<FieldSample> out;
  const auto& pes = model_.patchElements();
  for (size_t e = 0; e < pes.size(); ++e)
    for (int gj = 0; gj < grid; ++gj)
      for (int gi = 0; gi < grid; ++gi) {
        const double xi = pes[e].u0 + (pes[e].u1 - pes[e].u0) * gi / (grid - 1);
        const double eta = pes[e].v0 + (pes[e].v1 - pes[e].v0) * gj / (grid - 1);
        const PatchPoint pp = patchAt(xi, eta);
        FieldSample fs;
        fs.elem = static_cast<int>(e);
        fs.xi1 = xi;
        fs.xi2 = eta;
        fs.x = pp.x;
        fs.u = pp.u;
        fs.couple = pp.couplePhys;
        if (hybrid) {
          const M1Point mp = projectToM1(xi, eta);
          fs.sigma = membraneAt(mp.elem, mp.s, mp.t).sigmaPhys;
        } else {
          fs.sigma = pp.sigmaPhys;
        }
        fs.cauchy = fs.sigma + pp.momentTermPhys;
        out.push_back(fs);
      }
  return out;
}

Mat2 Recovery::CornerField::at(const std::vector<Mat2>& v, int e1, int e2, double s,
                               double t) const {
  auto idx = [&](int i, int j) { return i + n1 * j; };
  const double w00 = 0.25 * (1 - s) * (1 - t), w10 = 0.25 * (1 + s) * (1 - t);
  const double w01 = 0.25 * (1 - s) * (1 + t), w11 = 0.25 * (1 + s) * (1 + t);
  return w00 * v[idx(e1, e2)] + w10 * v[idx(e1 + 1, e2)] + w01 * v[idx(e1, e2 + 1)] +
         w11 * v[idx(e1 + 1, e2 + 1)];
}

Recovery::CornerField Recovery::cornerValues() const {
  if (model_.mesh().disc != Disc::B2M1)
    throw std::logic_error("corner-value interpolation requires a B2M1 discretization");
  const NurbsPatch& patch = model_.mesh().patch;
  const auto& bk1 = patch.knots1().breakpoints();
  const auto& bk2 = patch.knots2().breakpoints();
  const int ne1 = static_cast<int>(bk1.size()) - 1, ne2 = static_cast<int>(bk2.size()) - 1;

  CornerField cf;
  cf.n1 = ne1 + 1;
  cf.n2 = ne2 + 1;
  cf.sigma.resize(static_cast<size_t>(cf.n1) * cf.n2);
  cf.couple.resize(cf.sigma.size());
  cf.cauchy.resize(cf.sigma.size());

  for (int cj = 0; cj <= ne2; ++cj)
    for (int ci = 0; ci <= ne1; ++ci) {
      const double xi = bk1[ci], eta = bk2[cj];
      const M1Point mp = projectToM1(xi, eta);
      const Mat2 sig = membraneAt(mp.elem, mp.s, mp.t).sigmaPhys;

      Mat2 couple = Mat2::Zero(), moment = Mat2::Zero();
      int cnt = 0;
      for (int e2 = cj - 1; e2 <= cj; ++e2)
        for (int e1 = ci - 1; e1 <= ci; ++e1) {
          if (e1 < 0 || e2 < 0 || e1 >= ne1 || e2 >= ne2) continue;
          const PatchPoint pp = patchAtInSpan(xi, eta, patch.knots1().elementSpan(e1),
                                              patch.knots2().elementSpan(e2));
          couple += pp.couplePhys;
          moment += pp.momentTermPhys;
          ++cnt;
        }
      couple /= cnt;
      moment /= cnt;
      const int id = ci + cf.n1 * cj;
      cf.sigma[id] = sig;
      cf.couple[id] = couple;
      cf.cauchy[id] = sig + moment;
    }
  return cf;
}

std::vector<FieldSample> Recovery::interpolated(int grid) const {
  const CornerField cf = cornerValues();
  const auto& pes = model_.patchElements();
  const int ne1 = cf.n1 - 1;
  std::vector<FieldSample> out;
  out.reserve(pes.size() * grid * grid);
  for (size_t e = 0; e < pes.size(); ++e) {
    const int e1 = pes[e].e1, e2 = pes[e].e2;
    for (int gj = 0; gj < grid; ++gj)
      for (int gi = 0; gi < grid; ++gi) {
        const double s = -1.0 + 2.0 * gi / (grid - 1);
        const double t = -1.0 + 2.0 * gj / (grid - 1);
        const double xi = 0.5 * (pes[e].u0 + pes[e].u1) + 0.5 * s * (pes[e].u1 - pes[e].u0);
        const double eta = 0.5 * (pes[e].v0 + pes[e].v1) + 0.5 * t * (pes[e].v1 - pes[e].v0);
        const PatchPoint pp = patchAt(xi, eta);
        FieldSample fs;
        fs.elem = static_cast<int>(e);
        fs.xi1 = xi;
        fs.xi2 = eta;
        fs.x = pp.x;
        fs.u = pp.u;
        fs.sigma = cf.at(cf.sigma, e1, e2, s, t);
        fs.couple = cf.at(cf.couple, e1, e2, s, t);
        fs.cauchy = cf.at(cf.cauchy, e1, e2, s, t);
        out.push_back(fs);
      }
    (void)ne1;
  }
  return out;
}

std::vector<FieldSample> Recovery::constantMembrane() const {
  if (model_.mesh().disc != Disc::B2M1)
    throw std::logic_error("constant-stress recovery requires a B2M1 discretization");
  const int ne = static_cast<int>(model_.membraneElements().size());
  std::vector<FieldSample> out;
  out.reserve(ne);
  for (int e = 0; e < ne; ++e) {
    const MembranePoint mp = membraneAt(e, 0.0, 0.0);
    FieldSample fs;
    fs.elem = e;
    fs.x = mp.x;
    fs.u = mp.u;
    fs.sigma = mp.sigmaPhys;
    fs.surface = 1;
    out.push_back(fs);
  }
  return out;
}

ErrorNorms errorNorms(const Recovery& rec, const ReferenceFields& ref, bool interpolatedCauchy) {
  const ShellModel& model = rec.model();
  const NurbsPatch& patch = model.mesh().patch;
  const bool hybrid = model.mesh().disc == Disc::B2M1;
  const int p1 = patch.knots1().degree(), p2 = patch.knots2().degree();
  const GaussRule& g1 = gaussRule(p1 + 1);
  const GaussRule& g2 = gaussRule(p2 + 1);

  Recovery::CornerField cf;
  if (interpolatedCauchy) cf = rec.cornerValues();

  double nu = 0, du = 0, nM = 0, dM = 0, nN = 0, dN = 0, nS = 0, dS = 0;
  for (const auto& pe : model.patchElements()) {
    const double h1 = 0.5 * (pe.u1 - pe.u0), h2 = 0.5 * (pe.v1 - pe.v0);
    for (size_t q2 = 0; q2 < g2.points.size(); ++q2)
      for (size_t q1 = 0; q1 < g1.points.size(); ++q1) {
        const double xi = 0.5 * (pe.u0 + pe.u1) + h1 * g1.points[q1];
        const double eta = 0.5 * (pe.v0 + pe.v1) + h2 * g2.points[q2];
        const auto pp = rec.patchAt(xi, eta);
        const NurbsPatch::Frame f = patch.frame(xi, eta);
        const double dA =
            f.a1.cross(f.a2).norm() * h1 * h2 * g1.weights[q1] * g2.weights[q2];

        if (ref.displacement) {
          const Vec3 ur = ref.displacement(pp.x);
          nu += (pp.u - ur).squaredNorm() * dA;
          du += ur.squaredNorm() * dA;
        }
        if (ref.couple) {
          const Mat2 Mr = ref.couple(pp.x);
          nM += (pp.couplePhys - Mr).squaredNorm() * dA;
          dM += Mr.squaredNorm() * dA;
        }
        if (ref.cauchy) {
          Mat2 Nh;
          if (interpolatedCauchy) {
            Nh = cf.at(cf.cauchy, pe.e1, pe.e2, g1.points[q1], g2.points[q2]);
          } else if (hybrid) {
            const M1Point mp = rec.projectToM1(xi, eta);
            Nh = rec.membraneAt(mp.elem, mp.s, mp.t).sigmaPhys + pp.momentTermPhys;
          } else {
            Nh = pp.sigmaPhys + pp.momentTermPhys;
          }
          const Mat2 Nr = ref.cauchy(pp.x);
          nN += (Nh - Nr).squaredNorm() * dA;
          dN += Nr.squaredNorm() * dA;
        }
        if (!hybrid && ref.sigma) {
          const Mat2 Sr = ref.sigma(pp.x);
          nS += (pp.sigmaPhys - Sr).squaredNorm() * dA;
          dS += Sr.squaredNorm() * dA;
        }
      }
  }

  if (hybrid && ref.sigma) {
    const GaussRule& gm = gaussRule(2);
    const int ne = static_cast<int>(model.membraneElements().size());
    for (int e = 0; e < ne; ++e)
      for (int q2 = 0; q2 < 2; ++q2)
        for (int q1 = 0; q1 < 2; ++q1) {
          const auto mp = rec.membraneAt(e, gm.points[q1], gm.points[q2]);
          const double dA = mp.state.jac * gm.weights[q1] * gm.weights[q2];
          const Mat2 Sr = ref.sigma(mp.x);
          nS += (mp.sigmaPhys - Sr).squaredNorm() * dA;
          dS += Sr.squaredNorm() * dA;
        }
  }

  ErrorNorms en;
  en.u = du > 0 ? std::sqrt(nu / du) : 0.0;
  en.couple = dM > 0 ? std::sqrt(nM / dM) : 0.0;
  en.cauchy = dN > 0 ? std::sqrt(nN / dN) : 0.0;
  en.sigma = dS > 0 ? std::sqrt(nS / dS) : 0.0;
  return en;
}

Extrema componentExtrema(const std::vector<FieldSample>& samples, const Mat2 FieldSample::*field,
                         int ci, int cj) {
  Extrema e{1e300, -1e300};
  for (const auto& s : samples) {
    const double v = (s.*field)(ci, cj);
    e.min = std::min(e.min, v);
    e.max = std::max(e.max, v);
  }
  return e;
}

double oscillationMetric(const std::vector<FieldSample>& samples, const Mat2 FieldSample::*field,
                         int ci, int cj) {
  double metric = 0.0;
  size_t i = 0;
  while (i < samples.size()) {
    const int elem = samples[i].elem;
    const int surf = samples[i].surface;
    double sum = 0;
    size_t j = i;
    while (j < samples.size() && samples[j].elem == elem && samples[j].surface == surf) {
      sum += (samples[j].*field)(ci, cj);
      ++j;
    }
    const double mean = sum / (j - i);
    for (size_t k = i; k < j; ++k)
      metric = std::max(metric, std::abs((samples[k].*field)(ci, cj) - mean));
    i = j;
  }
  return metric;
}

namespace {
std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

void exportCsv(const std::vector<FieldSample>& samples, const std::string& path, int ci, int cj) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open CSV file for writing: " + path);
  os << "elem,xi1,xi2,x,y,z,u1,u2,u3,sig,M,N,surface\n";
  for (const auto& s : samples) {
    os << s.elem << ',' << fmt17(s.xi1) << ',' << fmt17(s.xi2) << ',' << fmt17(s.x.x()) << ','
       << fmt17(s.x.y()) << ',' << fmt17(s.x.z()) << ',' << fmt17(s.u.x()) << ','
       << fmt17(s.u.y()) << ',' << fmt17(s.u.z()) << ',' << fmt17(s.sigma(ci, cj)) << ','
       << fmt17(s.couple(ci, cj)) << ',' << fmt17(s.cauchy(ci, cj)) << ','
       << (s.surface == 1 ? "M1" : "B2") << '\n';
  }
  if (!os) throw std::runtime_error("write failure on CSV file: " + path);
}

void exportVtk(const std::vector<FieldSample>& samples, const std::string& path, int grid, int ci,
               int cj) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open VTK file for writing: " + path);
  const size_t n = samples.size();
  os << "# vtk DataFile Version 3.0\n";
  os << "shell solution fields\n";
  os << "ASCII\n";
  os << "DATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << n << " double\n";
  for (const auto& s : samples) {
    const Vec3 x = s.x + s.u;
    os << fmt17(x.x()) << ' ' << fmt17(x.y()) << ' ' << fmt17(x.z()) << '\n';
  }
  // one quad strip per sampled element
  const size_t perElem = static_cast<size_t>(grid) * grid;
  const size_t nelems = (grid > 1 && perElem > 0) ? n / perElem : 0;
  const size_t quads = nelems * (grid - 1) * (grid - 1);
  os << "CELLS " << quads << ' ' << 5 * quads << '\n';
  for (size_t e = 0; e < nelems; ++e) {
    const size_t base = e * perElem;
    for (int j = 0; j + 1 < grid; ++j)
      for (int i = 0; i + 1 < grid; ++i) {
        const size_t a = base + i + static_cast<size_t>(grid) * j;
        os << "4 " << a << ' ' << a + 1 << ' ' << a + 1 + grid << ' ' << a + grid << '\n';
      }
  }
  os << "CELL_TYPES " << quads << '\n';
  for (size_t q = 0; q < quads; ++q) os << "9\n";
  os << "POINT_DATA " << n << '\n';
  os << "VECTORS u double\n";
  for (const auto& s : samples)
    os << fmt17(s.u.x()) << ' ' << fmt17(s.u.y()) << ' ' << fmt17(s.u.z()) << '\n';
  auto scalars = [&](const char* name, auto getter) {
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (const auto& s : samples) os << fmt17(getter(s)) << '\n';
  };
  scalars("sig", [&](const FieldSample& s) { return s.sigma(ci, cj); });
  scalars("M", [&](const FieldSample& s) { return s.couple(ci, cj); });
  scalars("N", [&](const FieldSample& s) { return s.cauchy(ci, cj); });
  os << "SCALARS surface int 1\nLOOKUP_TABLE default\n";
  for (const auto& s : samples) os << s.surface << '\n';
  if (!os) throw std::runtime_error("write failure on VTK file: " + path);
}

}  // namespace klshell
