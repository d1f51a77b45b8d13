#include "klshell/patch.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace klshell {

NurbsPatch::NurbsPatch(KnotVector ku, KnotVector kv, std::vector<Vec3> points,
                       std::vector<double> weights)
    : ku_(std::move(ku)), kv_(std::move(kv)), pts_(std::move(points)), wts_(std::move(weights)) {
  n1_ = ku_.nodeCount();
  n2_ = kv_.nodeCount();
  if (static_cast<int>(pts_.size()) != n1_ * n2_)
    throw std::invalid_argument("patch: control net size does not match knot vectors");
  if (wts_.size() != pts_.size()) throw std::invalid_argument("patch: weight count mismatch");
  for (double w : wts_)
    if (!(w > 0.0)) throw std::invalid_argument("patch: weights must be strictly positive");
  disp_.assign(pts_.size(), Vec3::Zero());
}

SurfaceShapes NurbsPatch::shapes(double xi1, double xi2) const {
  return shapesFrom(ku_.evaluate(xi1), kv_.evaluate(xi2));
}

SurfaceShapes NurbsPatch::shapesInSpan(double xi1, double xi2, int span1, int span2) const {
  return shapesFrom(ku_.evaluateInSpan(xi1, span1), kv_.evaluateInSpan(xi2, span2));
}

SurfaceShapes NurbsPatch::shapesFrom(const KnotVector::Basis& bu,
                                     const KnotVector::Basis& bv) const {
  const int p1 = ku_.degree(), p2 = kv_.degree();
  const int ne = (p1 + 1) * (p2 + 1);

  SurfaceShapes sh;
  sh.count = ne;
  sh.N.resize(ne);
  sh.dN.resize(ne, 2);
  sh.d2N.resize(ne, 3);

  // weighted B-spline products B_I = Nu Nv w and their derivatives
  double W = 0, W1 = 0, W2 = 0, W11 = 0, W22 = 0, W12 = 0;
  int k = 0;
  for (int b = 0; b <= p2; ++b) {
    const int j = bv.first + b;
    for (int a = 0; a <= p1; ++a, ++k) {
      const int i = bu.first + a;
      const int id = nodeId(i, j);
      sh.nodes[k] = id;
      const double w = wts_[id];
      const double B = bu.N[a] * bv.N[b] * w;
      const double B1 = bu.dN[a] * bv.N[b] * w;
      const double B2 = bu.N[a] * bv.dN[b] * w;
      const double B11 = bu.d2N[a] * bv.N[b] * w;
      const double B22 = bu.N[a] * bv.d2N[b] * w;
      const double B12 = bu.dN[a] * bv.dN[b] * w;
      sh.N[k] = B;
      sh.dN(k, 0) = B1;
      sh.dN(k, 1) = B2;
      sh.d2N(k, 0) = B11;
      sh.d2N(k, 1) = B22;
      sh.d2N(k, 2) = B12;
      W += B;
      W1 += B1;
      W2 += B2;
      W11 += B11;
      W22 += B22;
      W12 += B12;
    }
  }

  // rational correction via the quotient rule
  const double invW = 1.0 / W;
  for (int q = 0; q < ne; ++q) {
    const double R = sh.N[q] * invW;
    const double R1 = (sh.dN(q, 0) - R * W1) * invW;
    const double R2 = (sh.dN(q, 1) - R * W2) * invW;
    sh.N[q] = R;
    sh.dN(q, 0) = R1;
    sh.dN(q, 1) = R2;
    sh.d2N(q, 0) = (sh.d2N(q, 0) - 2.0 * R1 * W1 - R * W11) * invW;
    sh.d2N(q, 1) = (sh.d2N(q, 1) - 2.0 * R2 * W2 - R * W22) * invW;
    sh.d2N(q, 2) = (sh.d2N(q, 2) - R1 * W2 - R2 * W1 - R * W12) * invW;
  }
  return sh;
}

NurbsPatch::Frame NurbsPatch::frame(double xi1, double xi2, bool current) const {
  const SurfaceShapes sh = shapes(xi1, xi2);
  Frame f;
  f.x.setZero();
  f.a1.setZero();
  f.a2.setZero();
  f.d11.setZero();
  f.d12.setZero();
  f.d22.setZero();
  for (int k = 0; k < sh.count; ++k) {
    Vec3 p = pts_[sh.nodes[k]];
    if (current) p += disp_[sh.nodes[k]];
    f.x += sh.N[k] * p;
    f.a1 += sh.dN(k, 0) * p;
    f.a2 += sh.dN(k, 1) * p;
    f.d11 += sh.d2N(k, 0) * p;
    f.d22 += sh.d2N(k, 1) * p;
    f.d12 += sh.d2N(k, 2) * p;
  }
  return f;
}

Vec3 NurbsPatch::position(double xi1, double xi2, bool current) const {
  return frame(xi1, xi2, current).x;
}

Eigen::Vector4d NurbsPatch::homogeneous(int id) const {
  const double w = wts_[id];
  return {pts_[id].x() * w, pts_[id].y() * w, pts_[id].z() * w, w};
}

void NurbsPatch::setHomogeneous(int id, const Eigen::Vector4d& h) {
  if (!(h[3] > 0.0)) throw std::invalid_argument("patch: homogeneous weight must stay positive");
  wts_[id] = h[3];
  pts_[id] = h.head<3>() / h[3];
}

M1Mesh buildM1(const NurbsPatch& patch) {
  M1Mesh m;
  m.ne1 = patch.n1() - 1;
  m.ne2 = patch.n2() - 1;
  m.elems.reserve(static_cast<size_t>(m.ne1) * m.ne2);
  for (int j = 0; j < m.ne2; ++j)
    for (int i = 0; i < m.ne1; ++i)
      m.elems.push_back({patch.nodeId(i, j), patch.nodeId(i + 1, j), patch.nodeId(i, j + 1),
                         patch.nodeId(i + 1, j + 1)});
  return m;
}

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void saveMesh(const NurbsPatch& patch, const M1Mesh& m1, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open mesh file for writing: " + path);
  os << "klshell mesh 1\n";
  os << "degrees " << patch.knots1().degree() << " " << patch.knots2().degree() << "\n";
  for (int d = 0; d < 2; ++d) {
    const auto& kv = (d == 0) ? patch.knots1() : patch.knots2();
    os << "knots" << (d + 1) << " " << kv.knots().size() << "\n";
    for (size_t i = 0; i < kv.knots().size(); ++i)
      os << fmt17(kv.knots()[i]) << (i + 1 < kv.knots().size() ? ' ' : '\n');
  }
  os << "net " << patch.n1() << " " << patch.n2() << "\n";
  for (int id = 0; id < patch.nodeCount(); ++id) {
    const Vec3& p = patch.point(id);
    os << fmt17(p.x()) << " " << fmt17(p.y()) << " " << fmt17(p.z()) << " "
       << fmt17(patch.weight(id)) << "\n";
  }
  os << "m1 " << m1.ne1 << " " << m1.ne2 << "\n";
  for (const auto& e : m1.elems) os << e[0] << " " << e[1] << " " << e[2] << " " << e[3] << "\n";
  if (!os) throw std::runtime_error("write failure on mesh file: " + path);
}

LoadedMesh loadMesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open mesh file: " + path);
  std::string word;
  std::string magic, kind;
  int version;
  is >> magic >> kind >> version;
  if (magic != "klshell" || kind != "mesh" || version != 1)
    throw std::runtime_error("unrecognized mesh header in " + path);
  int p1, p2;
  is >> word >> p1 >> p2;
  std::array<std::vector<double>, 2> knots;
  for (int d = 0; d < 2; ++d) {
    size_t nk;
    is >> word >> nk;
    knots[d].resize(nk);
    for (auto& v : knots[d]) is >> v;
  }
  int n1, n2;
  is >> word >> n1 >> n2;
  std::vector<Vec3> pts(static_cast<size_t>(n1) * n2);
  std::vector<double> wts(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) is >> pts[i].x() >> pts[i].y() >> pts[i].z() >> wts[i];
  LoadedMesh out{NurbsPatch(KnotVector(p1, knots[0]), KnotVector(p2, knots[1]), std::move(pts),
                            std::move(wts)),
                 {}};
  is >> word >> out.m1.ne1 >> out.m1.ne2;
  const int ne = out.m1.ne1 * out.m1.ne2;
  out.m1.elems.resize(ne);
  for (auto& e : out.m1.elems) is >> e[0] >> e[1] >> e[2] >> e[3];
  if (!is) throw std::runtime_error("truncated mesh file: " + path);
  return out;
}

}  // namespace klshell
