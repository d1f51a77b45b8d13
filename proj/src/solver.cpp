#include "klshell/solver.hpp"
#include <limits>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace klshell {

std::vector<int> edgeNodes(const NurbsPatch& patch, Edge edge, int row) {
  std::vector<int> out;
  const int n1 = patch.n1(), n2 = patch.n2();
  switch (edge) {
    case Edge::U0:
      for (int j = 0; j < n2; ++j) out.push_back(patch.nodeId(row, j));
      break;
    case Edge::U1:
      for (int j = 0; j < n2; ++j) out.push_back(patch.nodeId(n1 - 1 - row, j));
      break;
    case Edge::V0:
      for (int i = 0; i < n1; ++i) out.push_back(patch.nodeId(i, row));
      break;
    case Edge::V1:
      for (int i = 0; i < n1; ++i) out.push_back(patch.nodeId(i, n2 - 1 - row));
      break;
  }
  return out;
}

void fixNodes(std::vector<DirichletBC>& bcs, const std::vector<int>& nodes, bool x, bool y, bool z,
              double value) {
  for (int n : nodes) {
    if (x) bcs.push_back({n, 0, value});
    if (y) bcs.push_back({n, 1, value});
    if (z) bcs.push_back({n, 2, value});
  }
}

void BlockMatrix::buildPattern(int nNodes, const std::vector<std::vector<int>>& stencils) {
  n_ = nNodes;
  std::vector<std::vector<int>> cols(nNodes);
  for (const auto& st : stencils)
    for (int a : st)
      for (int b : st)
        if (a >= b) cols[b].push_back(a);
  colPtr_.assign(nNodes + 1, 0);
  rowIdx_.clear();
  for (int c = 0; c < nNodes; ++c) {
    auto& v = cols[c];
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    colPtr_[c + 1] = colPtr_[c] + static_cast<int>(v.size());
    rowIdx_.insert(rowIdx_.end(), v.begin(), v.end());
  }
  blocks_.assign(rowIdx_.size(), Mat3::Zero());
}

void BlockMatrix::setZero() {
  for (auto& b : blocks_) b.setZero();
}

int BlockMatrix::slot(int row, int col) const {
  const int lo = colPtr_[col], hi = colPtr_[col + 1];
  auto it = std::lower_bound(rowIdx_.begin() + lo, rowIdx_.begin() + hi, row);
  if (it == rowIdx_.begin() + hi || *it != row)
    throw std::logic_error("block matrix: entry outside pattern");
  return static_cast<int>(it - rowIdx_.begin());
}

void BlockMatrix::add(int row, int col, const Mat3& m) { blocks_[slot(row, col)] += m; }

Eigen::VectorXd BlockMatrix::multiply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(3 * n_);
  for (int c = 0; c < n_; ++c)
    for (int s = colPtr_[c]; s < colPtr_[c + 1]; ++s) {
      const int r = rowIdx_[s];
      y.segment<3>(3 * r) += blocks_[s] * x.segment<3>(3 * c);
      if (r != c) y.segment<3>(3 * c) += blocks_[s].transpose() * x.segment<3>(3 * r);
    }
  return y;
}

void DofMap::build(int nodes, const std::vector<DirichletBC>& bcs,
                   const std::vector<TieBC>& ties) {
  nNodes = nodes;
  index.assign(3 * nodes, 0);
  prescribed.assign(3 * nodes, 0.0);
  for (const auto& bc : bcs) {
    if (bc.node < 0 || bc.node >= nodes || bc.comp < 0 || bc.comp > 2)
      throw std::invalid_argument("boundary condition refers to a nonexistent dof");
    index[3 * bc.node + bc.comp] = -1;
    prescribed[3 * bc.node + bc.comp] = bc.value;
  }
  // slaves follow their master's unknown (or its prescribed value)
  std::vector<int> master(3 * nodes, -1);
  for (const auto& t : ties) {
    if (t.slave < 0 || t.slave >= nodes || t.master < 0 || t.master >= nodes || t.comp < 0 ||
        t.comp > 2 || t.slave == t.master)
      throw std::invalid_argument("tie constraint refers to a nonexistent dof");
    master[3 * t.slave + t.comp] = 3 * t.master + t.comp;
  }
  for (size_t d = 0; d < master.size(); ++d) {
    int m = master[d];
    int hops = 0;
    while (m >= 0 && master[m] >= 0) {
      m = master[m];
      if (++hops > nodes) throw std::invalid_argument("cyclic tie constraints");
    }
    master[d] = m;
  }
  nFree = 0;
  for (size_t d = 0; d < index.size(); ++d)
    if (index[d] == 0 && master[d] < 0) index[d] = nFree++;
  for (size_t d = 0; d < index.size(); ++d)
    if (master[d] >= 0) {
      const int m = master[d];
      if (index[d] == -1)
        throw std::invalid_argument("dof is both tied and prescribed");
      index[d] = index[m];
      if (index[m] < 0) prescribed[d] = prescribed[m];
    }
}

ShellModel::ShellModel(HybridMesh mesh, KoiterMaterial mat)
    : mesh_(std::move(mesh)), mat_(mat) {}

void ShellModel::setBoundaryConditions(std::vector<DirichletBC> bcs) { bcs_ = std::move(bcs); }
void ShellModel::setTies(std::vector<TieBC> ties) { ties_ = std::move(ties); }
void ShellModel::setLoads(Loads loads) { loads_ = std::move(loads); }

void ShellModel::finalize() {
  const NurbsPatch& patch = mesh_.patch;
  const int n = patch.nodeCount();
  dofs_.build(n, bcs_, ties_);
  patchKind_ = (mesh_.disc == Disc::B2M1) ? ElementKind::Bending : ElementKind::Full;

  // patch elements
  const auto& bk1 = patch.knots1().breakpoints();
  const auto& bk2 = patch.knots2().breakpoints();
  const int p1 = patch.knots1().degree(), p2 = patch.knots2().degree();
  patchElems_.clear();
  for (int e2 = 0; e2 + 1 < static_cast<int>(bk2.size()); ++e2)
    for (int e1 = 0; e1 + 1 < static_cast<int>(bk1.size()); ++e1) {
      PatchElement pe;
      pe.e1 = e1;
      pe.e2 = e2;
      pe.u0 = bk1[e1];
      pe.u1 = bk1[e1 + 1];
      pe.v0 = bk2[e2];
      pe.v1 = bk2[e2 + 1];
      const int s1 = patch.knots1().findSpan(0.5 * (pe.u0 + pe.u1));
      const int s2 = patch.knots2().findSpan(0.5 * (pe.v0 + pe.v1));
      for (int b = 0; b <= p2; ++b)
        for (int a = 0; a <= p1; ++a) pe.nodes.push_back(patch.nodeId(s1 - p1 + a, s2 - p2 + b));
      patchElems_.push_back(std::move(pe));
    }

  // membrane elements with elemental redistribution folded in
  W_ = assembleW(mesh_);
  membraneElems_.clear();
  for (const auto& conn : mesh_.m1.elems) {
    MembraneElement me;
    me.conn = conn;
    std::vector<int> ext;
    for (int k = 0; k < 4; ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(W_, conn[k]); it; ++it)
        ext.push_back(static_cast<int>(it.row()));
    std::sort(ext.begin(), ext.end());
    ext.erase(std::unique(ext.begin(), ext.end()), ext.end());
    me.ext = std::move(ext);
    me.P = Eigen::MatrixXd::Zero(me.ext.size(), 4);
    for (int k = 0; k < 4; ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(W_, conn[k]); it; ++it) {
        const auto pos = std::lower_bound(me.ext.begin(), me.ext.end(), it.row());
        me.P(pos - me.ext.begin(), k) = it.value();
      }
    me.identity = me.ext.size() == 4 && std::equal(me.ext.begin(), me.ext.end(), conn.begin()) &&
                  me.P.isIdentity(0.0);
    Eigen::Matrix3Xd Xext(3, me.ext.size());
    for (size_t i = 0; i < me.ext.size(); ++i) Xext.col(i) = patch.point(me.ext[i]);
    me.Xr = Xext * me.P;
    membraneElems_.push_back(std::move(me));
  }

  std::vector<std::vector<int>> stencils;
  stencils.reserve(patchElems_.size() + membraneElems_.size());
  for (const auto& pe : patchElems_) stencils.push_back(pe.nodes);
  for (const auto& me : membraneElems_) stencils.push_back(me.ext);
  K_.buildPattern(n, stencils);

  // reduced CSC structure and the block-entry -> value-offset table; tie
  // constraints can fold several block entries onto one reduced entry (and
  // an off-diagonal pair onto the diagonal, which then counts twice)
  valueTarget_.assign(K_.blocks().size() * 9, -1);
  valueWeight_.assign(valueTarget_.size(), 1);
  struct Entry {
    int row;
    int id;  // 9*slot + 3*bc + br
  };
  std::vector<std::vector<Entry>> columns(dofs_.nFree);
  for (int c = 0; c < n; ++c)
    for (int bc = 0; bc < 3; ++bc) {
      const int cj = dofs_.index[3 * c + bc];
      if (cj < 0) continue;
      for (int s = K_.colPtr()[c]; s < K_.colPtr()[c + 1]; ++s) {
        const int r = K_.rowIdx()[s];
        for (int br = (r == c ? bc : 0); br < 3; ++br) {
          const int ri = dofs_.index[3 * r + br];
          if (ri < 0) continue;
          const int id = 9 * s + 3 * bc + br;
          if (ri == cj && 3 * r + br != 3 * c + bc) valueWeight_[id] = 2;
          const int lo = std::min(ri, cj), hi = std::max(ri, cj);
          columns[lo].push_back({hi, id});
        }
      }
    }
  std::vector<int> outer(dofs_.nFree + 1, 0);
  std::vector<int> inner;
  int nnz = 0;
  for (int col = 0; col < dofs_.nFree; ++col) {
    auto& es = columns[col];
    std::sort(es.begin(), es.end(), [](const Entry& a, const Entry& b) { return a.row < b.row; });
    for (size_t k = 0; k < es.size(); ++k) {
      if (k == 0 || es[k].row != es[k - 1].row) {
        inner.push_back(es[k].row);
        ++nnz;
      }
      valueTarget_[es[k].id] = nnz - 1;
    }
    outer[col + 1] = nnz;
  }
  std::vector<double> zeros(nnz, 0.0);
  Kred_ = Eigen::Map<const Eigen::SparseMatrix<double>>(dofs_.nFree, dofs_.nFree, nnz,
                                                        outer.data(), inner.data(), zeros.data());
  analyzed_ = false;

  fInt_ = Eigen::VectorXd::Zero(3 * n);
  fAbs_ = Eigen::VectorXd::Zero(3 * n);
  assembleExternal();
  finalized_ = true;
}

void ShellModel::assembleExternal() {
  const NurbsPatch& patch = mesh_.patch;
  fExt_ = Eigen::VectorXd::Zero(3 * patch.nodeCount());

  if (!loads_.surface.isZero()) {
    const int p1 = patch.knots1().degree(), p2 = patch.knots2().degree();
    const GaussRule& g1 = gaussRule(p1 + 1);
    const GaussRule& g2 = gaussRule(p2 + 1);
    for (const auto& pe : patchElems_) {
      const double h1 = 0.5 * (pe.u1 - pe.u0), h2 = 0.5 * (pe.v1 - pe.v0);
      for (size_t q2 = 0; q2 < g2.points.size(); ++q2)
        for (size_t q1 = 0; q1 < g1.points.size(); ++q1) {
          const double xi = 0.5 * (pe.u0 + pe.u1) + h1 * g1.points[q1];
          const double eta = 0.5 * (pe.v0 + pe.v1) + h2 * g2.points[q2];
          SurfaceShapes sh = patch.shapes(xi, eta);
          Vec3 A1 = Vec3::Zero(), A2 = Vec3::Zero();
          for (int k = 0; k < sh.count; ++k) {
            A1 += sh.dN(k, 0) * patch.point(sh.nodes[k]);
            A2 += sh.dN(k, 1) * patch.point(sh.nodes[k]);
          }
          const double dA =
              A1.cross(A2).norm() * h1 * h2 * g1.weights[q1] * g2.weights[q2];
          for (int k = 0; k < sh.count; ++k)
            fExt_.segment<3>(3 * sh.nodes[k]) += sh.N[k] * loads_.surface * dA;
        }
    }
  }

  for (const auto& tr : loads_.tractions) {
    const bool alongV = (tr.edge == Edge::U0 || tr.edge == Edge::U1);
    const KnotVector& kv = alongV ? patch.knots2() : patch.knots1();
    const double fixed = (tr.edge == Edge::U0 || tr.edge == Edge::V0)
                             ? (alongV ? patch.knots1().front() : patch.knots2().front())
                             : (alongV ? patch.knots1().back() : patch.knots2().back());
    const GaussRule& g = gaussRule(kv.degree() + 1);
    const auto& brk = kv.breakpoints();
    for (size_t e = 0; e + 1 < brk.size(); ++e) {
      const double half = 0.5 * (brk[e + 1] - brk[e]);
      for (size_t q = 0; q < g.points.size(); ++q) {
        const double t = 0.5 * (brk[e] + brk[e + 1]) + half * g.points[q];
        const double xi = alongV ? fixed : t;
        const double eta = alongV ? t : fixed;
        SurfaceShapes sh = patch.shapes(xi, eta);
        Vec3 tang = Vec3::Zero();
        for (int k = 0; k < sh.count; ++k)
          tang += sh.dN(k, alongV ? 1 : 0) * patch.point(sh.nodes[k]);
        const double dS = tang.norm() * half * g.weights[q];
        for (int k = 0; k < sh.count; ++k)
          fExt_.segment<3>(3 * sh.nodes[k]) += sh.N[k] * tr.traction * dS;
      }
    }
  }

  for (const auto& pl : loads_.points) fExt_.segment<3>(3 * pl.node) += pl.force;
}

void ShellModel::assemble(const Eigen::VectorXd& u, Regime regime) {
  if (!finalized_) throw std::logic_error("model not finalized");
  const NurbsPatch& patch = mesh_.patch;
  K_.setZero();
  fInt_.setZero();
  fAbs_.setZero();

  const int p1 = patch.knots1().degree(), p2 = patch.knots2().degree();
  const GaussRule& g1 = gaussRule(p1 + 1);
  const GaussRule& g2 = gaussRule(p2 + 1);

  Eigen::VectorXd fe(3 * kMaxBasis);
  Eigen::MatrixXd ke(3 * kMaxBasis, 3 * kMaxBasis);
  for (const auto& pe : patchElems_) {
    const int n = static_cast<int>(pe.nodes.size());
    NodeBlock Xe(3, n), xe(3, n);
    for (int k = 0; k < n; ++k) {
      Xe.col(k) = patch.point(pe.nodes[k]);
      xe.col(k) = Xe.col(k) + u.segment<3>(3 * pe.nodes[k]);
    }
    fe.head(3 * n).setZero();
    ke.topLeftCorner(3 * n, 3 * n).setZero();
    const double h1 = 0.5 * (pe.u1 - pe.u0), h2 = 0.5 * (pe.v1 - pe.v0);
    for (size_t q2 = 0; q2 < g2.points.size(); ++q2)
      for (size_t q1 = 0; q1 < g1.points.size(); ++q1) {
        const double xi = 0.5 * (pe.u0 + pe.u1) + h1 * g1.points[q1];
        const double eta = 0.5 * (pe.v0 + pe.v1) + h2 * g2.points[q2];
        SurfaceShapes sh = patch.shapes(xi, eta);
        sh.dN.col(0) *= h1;
        sh.dN.col(1) *= h2;
        sh.d2N.col(0) *= h1 * h1;
        sh.d2N.col(1) *= h2 * h2;
        sh.d2N.col(2) *= h1 * h2;
        accumulatePoint(sh, g1.weights[q1] * g2.weights[q2], Xe, xe, mat_, patchKind_, regime,
                        &fe, &ke, nullptr);
      }
    for (int i = 0; i < n; ++i) {
      fInt_.segment<3>(3 * pe.nodes[i]) += fe.segment<3>(3 * i);
      fAbs_.segment<3>(3 * pe.nodes[i]) += fe.segment<3>(3 * i).cwiseAbs();
      for (int j = 0; j < n; ++j)
        if (pe.nodes[i] >= pe.nodes[j])
          K_.add(pe.nodes[i], pe.nodes[j], ke.block<3, 3>(3 * i, 3 * j));
    }
  }

  const GaussRule& gm = gaussRule(2);
  for (const auto& me : membraneElems_) {
    const int next = static_cast<int>(me.ext.size());
    Eigen::Matrix3Xd Uext(3, next);
    for (int i = 0; i < next; ++i) Uext.col(i) = u.segment<3>(3 * me.ext[i]);
    NodeBlock Xe = me.Xr;
    NodeBlock xe = me.Xr + Uext * me.P;

    Eigen::VectorXd f4 = Eigen::VectorXd::Zero(12);
    Eigen::MatrixXd k4 = Eigen::MatrixXd::Zero(12, 12);
    SurfaceShapes sh;
    for (size_t q2 = 0; q2 < 2; ++q2)
      for (size_t q1 = 0; q1 < 2; ++q1) {
        bilinearShapes(gm.points[q1], gm.points[q2], sh);
        accumulatePoint(sh, gm.weights[q1] * gm.weights[q2], Xe, xe, mat_, ElementKind::Membrane,
                        regime, &f4, &k4, nullptr);
      }

    if (me.identity) {
      for (int i = 0; i < 4; ++i) {
        fInt_.segment<3>(3 * me.conn[i]) += f4.segment<3>(3 * i);
        fAbs_.segment<3>(3 * me.conn[i]) += f4.segment<3>(3 * i).cwiseAbs();
        for (int j = 0; j < 4; ++j)
          if (me.conn[i] >= me.conn[j])
            K_.add(me.conn[i], me.conn[j], k4.block<3, 3>(3 * i, 3 * j));
      }
    } else {
      for (int i = 0; i < next; ++i) {
        Vec3 fi = Vec3::Zero();
        for (int k = 0; k < 4; ++k) fi += me.P(i, k) * f4.segment<3>(3 * k);
        fInt_.segment<3>(3 * me.ext[i]) += fi;
        fAbs_.segment<3>(3 * me.ext[i]) += fi.cwiseAbs();
        for (int j = 0; j < next; ++j) {
          if (me.ext[i] < me.ext[j]) continue;
          Mat3 kij = Mat3::Zero();
          for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l)
              if (me.P(i, k) != 0.0 && me.P(j, l) != 0.0)
                kij += me.P(i, k) * me.P(j, l) * k4.block<3, 3>(3 * k, 3 * l);
          K_.add(me.ext[i], me.ext[j], kij);
        }
      }
    }
  }

  // refresh the reduced matrix values
  double* vp = Kred_.valuePtr();
  std::fill(vp, vp + Kred_.nonZeros(), 0.0);
  const auto& blocks = K_.blocks();
  for (size_t s = 0; s < blocks.size(); ++s)
    for (int bc = 0; bc < 3; ++bc)
      for (int br = 0; br < 3; ++br) {
        const int id = static_cast<int>(9 * s) + 3 * bc + br;
        const int t = valueTarget_[id];
        if (t >= 0) vp[t] += valueWeight_[id] * blocks[s](br, bc);
      }
}

double ShellModel::internalEnergy(const Eigen::VectorXd& u, Regime regime) const {
  const NurbsPatch& patch = mesh_.patch;
  const int p1 = patch.knots1().degree(), p2 = patch.knots2().degree();
  const GaussRule& g1 = gaussRule(p1 + 1);
  const GaussRule& g2 = gaussRule(p2 + 1);
  double energy = 0.0;

  for (const auto& pe : patchElems_) {
    const int n = static_cast<int>(pe.nodes.size());
    NodeBlock Xe(3, n), xe(3, n);
    for (int k = 0; k < n; ++k) {
      Xe.col(k) = patch.point(pe.nodes[k]);
      xe.col(k) = Xe.col(k) + u.segment<3>(3 * pe.nodes[k]);
    }
    const double h1 = 0.5 * (pe.u1 - pe.u0), h2 = 0.5 * (pe.v1 - pe.v0);
    for (size_t q2 = 0; q2 < g2.points.size(); ++q2)
      for (size_t q1 = 0; q1 < g1.points.size(); ++q1) {
        const double xi = 0.5 * (pe.u0 + pe.u1) + h1 * g1.points[q1];
        const double eta = 0.5 * (pe.v0 + pe.v1) + h2 * g2.points[q2];
        SurfaceShapes sh = patch.shapes(xi, eta);
        sh.dN.col(0) *= h1;
        sh.dN.col(1) *= h2;
        sh.d2N.col(0) *= h1 * h1;
        sh.d2N.col(1) *= h2 * h2;
        sh.d2N.col(2) *= h1 * h2;
        accumulatePoint(sh, g1.weights[q1] * g2.weights[q2], Xe, xe, mat_, patchKind_, regime,
                        nullptr, nullptr, &energy);
      }
  }

  const GaussRule& gm = gaussRule(2);
  for (const auto& me : membraneElems_) {
    const int next = static_cast<int>(me.ext.size());
    Eigen::Matrix3Xd Uext(3, next);
    for (int i = 0; i < next; ++i) Uext.col(i) = u.segment<3>(3 * me.ext[i]);
    NodeBlock Xe = me.Xr;
    NodeBlock xe = me.Xr + Uext * me.P;
    SurfaceShapes sh;
    for (size_t q2 = 0; q2 < 2; ++q2)
      for (size_t q1 = 0; q1 < 2; ++q1) {
        bilinearShapes(gm.points[q1], gm.points[q2], sh);
        accumulatePoint(sh, gm.weights[q1] * gm.weights[q2], Xe, xe, mat_, ElementKind::Membrane,
                        regime, nullptr, nullptr, &energy);
      }
  }
  return energy;
}

double ShellModel::residualFloor(const Eigen::VectorXd& u) const {
  const int n = nodeCount();
  Eigen::VectorXd xabs(3 * n);
  for (int k = 0; k < n; ++k)
    xabs.segment<3>(3 * k) =
        mesh_.patch.point(k).cwiseAbs() + u.segment<3>(3 * k).cwiseAbs();
  Eigen::VectorXd kx = Eigen::VectorXd::Zero(3 * n);
  for (int c = 0; c < K_.nodeCount(); ++c)
    for (int s = K_.colPtr()[c]; s < K_.colPtr()[c + 1]; ++s) {
      const int r = K_.rowIdx()[s];
      const Mat3 ab = K_.blocks()[s].cwiseAbs();
      kx.segment<3>(3 * r) += ab * xabs.segment<3>(3 * c);
      if (r != c) kx.segment<3>(3 * c) += ab.transpose() * xabs.segment<3>(3 * r);
    }
  double norm2 = 0;
  for (size_t i = 0; i < dofs_.index.size(); ++i)
    if (dofs_.index[i] >= 0) norm2 += kx[i] * kx[i];
  return std::numeric_limits<double>::epsilon() * std::sqrt(norm2);
}

void ShellModel::factorize() {
  if (dofs_.nFree == 0) return;
  if (!analyzed_) {
    llt_.analyzePattern(Kred_);
    analyzed_ = true;
  }
  llt_.factorize(Kred_);
  usingFallback_ = llt_.info() != Eigen::Success;
  if (usingFallback_) {
    if (!ldltAnalyzed_) {
      ldlt_.analyzePattern(Kred_);
      ldltAnalyzed_ = true;
    }
    ldlt_.factorize(Kred_);
    if (ldlt_.info() != Eigen::Success)
      throw std::runtime_error(
          "tangent factorization failed: system singular or severely ill-conditioned");
  }
}

Eigen::VectorXd ShellModel::solveReduced(const Eigen::VectorXd& rhs) {
  if (dofs_.nFree == 0) return Eigen::VectorXd();
  factorize();
  auto solve = [&](const Eigen::VectorXd& b) {
    return usingFallback_ ? Eigen::VectorXd(ldlt_.solve(b)) : Eigen::VectorXd(llt_.solve(b));
  };
  Eigen::VectorXd d = solve(rhs);
  // iterative refinement against the direct-solve residual
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::VectorXd r = rhs - Kred_.selfadjointView<Eigen::Lower>() * d;
    if (r.norm() <= 1e-15 * rhs.norm()) break;
    d += solve(r);
  }
  return d;
}

namespace {

Eigen::VectorXd reduceVector(const DofMap& dofs, const Eigen::VectorXd& full) {
  // tied dofs accumulate into their shared unknown (virtual-work sum)
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dofs.nFree);
  for (size_t i = 0; i < dofs.index.size(); ++i)
    if (dofs.index[i] >= 0) out[dofs.index[i]] += full[i];
  return out;
}

}  // namespace

Eigen::VectorXd ShellModel::solveLinear() {
  if (!finalized_) finalize();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(3 * nodeCount());
  for (size_t i = 0; i < dofs_.index.size(); ++i)
    if (dofs_.index[i] < 0) u[i] = dofs_.prescribed[i];
  assemble(u, Regime::Linear);  // fInt = K * prescribed lift
  const Eigen::VectorXd rhs = reduceVector(dofs_, fExt_ - fInt_);
  const Eigen::VectorXd du = solveReduced(rhs);
  for (size_t i = 0; i < dofs_.index.size(); ++i)
    if (dofs_.index[i] >= 0) u[i] += du[dofs_.index[i]];
  return u;
}

NewtonReport ShellModel::solveNewton(const NewtonOptions& opts, Eigen::VectorXd& u) {
  if (!finalized_) finalize();
  NewtonReport rep;
  const Eigen::VectorXd fExtRed = reduceVector(dofs_, fExt_);
  for (int step = 1; step <= opts.loadSteps; ++step) {
    const double lam = static_cast<double>(step) / opts.loadSteps;
    for (size_t i = 0; i < dofs_.index.size(); ++i)
      if (dofs_.index[i] < 0) u[i] = lam * dofs_.prescribed[i];

    std::vector<double> hist;
    int iters = 0;
    bool ok = false;
    const double ref = std::max(lam * fExtRed.norm(), 1e-300);
    for (int it = 0; it <= opts.maxIterations; ++it) {
      assemble(u, Regime::Nonlinear);
      const Eigen::VectorXd r = reduceVector(dofs_, fInt_) - lam * fExtRed;
      const double res = r.norm();
      hist.push_back(res);
      // accept the roundoff floor of the assembled residual, but only after
      // at least one correction
      if (res <= opts.tolerance * ref + (it > 0 ? residualFloor(u) : 0.0)) {
        ok = true;
        break;
      }
      if (it == opts.maxIterations) break;
      const Eigen::VectorXd du = solveReduced(-r);
      for (size_t i = 0; i < dofs_.index.size(); ++i)
        if (dofs_.index[i] >= 0) u[i] += du[dofs_.index[i]];
      ++iters;
    }
    rep.iterations.push_back(iters);
    rep.residuals.push_back(std::move(hist));
    if (!ok) {
      rep.converged = false;
      return rep;
    }
  }
  rep.converged = true;
  return rep;
}

Eigen::VectorXd ShellModel::reactions(const Eigen::VectorXd& u, Regime regime, double loadFactor) {
  assemble(u, regime);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(3 * nodeCount());
  for (size_t i = 0; i < dofs_.index.size(); ++i)
    if (dofs_.index[i] < 0) r[i] = fInt_[i] - loadFactor * fExt_[i];
  return r;
}

int ShellModel::bandwidth() const {
  int maxDiff = 0;
  for (int c = 0; c < K_.nodeCount(); ++c)
    for (int s = K_.colPtr()[c]; s < K_.colPtr()[c + 1]; ++s)
      maxDiff = std::max(maxDiff, K_.rowIdx()[s] - c);
  return 3 * maxDiff + 2;
}

}  // namespace klshell
