#pragma once

#include <array>
#include <string>
#include <vector>

#include "klshell/bspline.hpp"
#include "klshell/types.hpp"

namespace klshell {

/// Bilinear Lagrange elements built directly on the control net.
/// Element (i,j) connects net nodes (i,j),(i+1,j),(i,j+1),(i+1,j+1).
struct M1Mesh {
  int ne1 = 0, ne2 = 0;
  std::vector<std::array<int, 4>> elems;
  bool empty() const { return elems.empty(); }
  int elementCount() const { return static_cast<int>(elems.size()); }
};

/// Rational tensor-product B-spline surface with per-node displacement slots.
class NurbsPatch {
 public:
  NurbsPatch() = default;
  NurbsPatch(KnotVector ku, KnotVector kv, std::vector<Vec3> points, std::vector<double> weights);

  const KnotVector& knots1() const { return ku_; }
  const KnotVector& knots2() const { return kv_; }
  int n1() const { return n1_; }
  int n2() const { return n2_; }
  int nodeCount() const { return n1_ * n2_; }
  int nodeId(int i, int j) const { return i + n1_ * j; }
  std::pair<int, int> nodeIJ(int id) const { return {id % n1_, id / n1_}; }

  const Vec3& point(int id) const { return pts_[id]; }
  const std::vector<Vec3>& points() const { return pts_; }
  std::vector<Vec3>& points() { return pts_; }
  double weight(int id) const { return wts_[id]; }
  const std::vector<double>& weights() const { return wts_; }

  std::vector<Vec3>& displacements() { return disp_; }
  const std::vector<Vec3>& displacements() const { return disp_; }

  /// Rational shape values with first and second patch-parameter derivatives.
  SurfaceShapes shapes(double xi1, double xi2) const;
  /// One-sided variant on given knot spans (element limits at breakpoints).
  SurfaceShapes shapesInSpan(double xi1, double xi2, int span1, int span2) const;

  struct Frame {
    Vec3 x, a1, a2, d11, d12, d22;
  };
  /// Surface point and derivatives; current configuration adds displacements.
  Frame frame(double xi1, double xi2, bool current = false) const;
  Vec3 position(double xi1, double xi2, bool current = false) const;

  /// Homogeneous (wx,wy,wz,w) access used by refinement and elevation.
  Eigen::Vector4d homogeneous(int id) const;
  void setHomogeneous(int id, const Eigen::Vector4d& h);

 private:
  SurfaceShapes shapesFrom(const KnotVector::Basis& bu, const KnotVector::Basis& bv) const;

  KnotVector ku_, kv_;
  int n1_ = 0, n2_ = 0;
  std::vector<Vec3> pts_;
  std::vector<double> wts_;
  std::vector<Vec3> disp_;
};

/// Structured bilinear mesh covering the whole control net.
M1Mesh buildM1(const NurbsPatch& patch);

/// Plain-text mesh format with exact decimal round-trip (17 significant digits).
void saveMesh(const NurbsPatch& patch, const M1Mesh& m1, const std::string& path);
struct LoadedMesh {
  NurbsPatch patch;
  M1Mesh m1;
};
LoadedMesh loadMesh(const std::string& path);

}  // namespace klshell
