#include "klshell/hybrid.hpp"

#include <stdexcept>
#include <vector>

namespace klshell {

HybridMesh buildHybrid(NurbsPatch patch, Disc disc, RedistributionMode mode) {
  HybridMesh hm;
  hm.disc = disc;
  if (disc == Disc::B2M1) {
    if (patch.knots1().degree() != 2 || patch.knots2().degree() != 2)
      throw std::invalid_argument("B2M1 requires a biquadratic patch");
    hm.m1 = buildM1(patch);
    hm.mode = mode;
  } else {
    hm.mode = RedistributionMode::None;
  }
  hm.patch = std::move(patch);
  return hm;
}

Eigen::MatrixXd localRedistribution(RedistributionCase c) {
  Eigen::MatrixXd w;
  switch (c) {
    case RedistributionCase::Center:
      w.resize(1, 1);
      w << 1.0;
      return w;
    case RedistributionCase::Edge:
      w.resize(2, 2);
      w << 9, 1, 0, 8;
      return w / 9.0;
    case RedistributionCase::DoubleEdge:
      w.resize(3, 3);
      w << 6, 1, 0, 0, 4, 0, 0, 1, 6;
      return w / 6.0;
    case RedistributionCase::Corner:
      w.resize(4, 4);
      w << 81, 9, 9, 1, 0, 72, 0, 8, 0, 0, 72, 8, 0, 0, 0, 64;
      return w / 81.0;
    case RedistributionCase::DoubleCorner:
      w.resize(6, 6);
      w << 54, 6, 9, 1, 0, 0,   //
          0, 48, 0, 8, 0, 0,    //
          0, 0, 36, 4, 0, 0,    //
          0, 0, 0, 32, 0, 0,    //
          0, 0, 9, 1, 54, 6,    //
          0, 0, 0, 8, 0, 48;
      return w / 54.0;
  }
  throw std::logic_error("unknown redistribution case");
}

Eigen::MatrixXd redistribution1D(int nodes, int spans) {
  if (spans == 1) {
    if (nodes != 3)
      throw std::invalid_argument("redistribution: a single-span direction must have 3 nodes");
    return localRedistribution(RedistributionCase::DoubleEdge);
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(nodes, nodes);
  w(0, 1) = 1.0 / 9.0;
  w(1, 1) = 8.0 / 9.0;
  w(nodes - 1, nodes - 2) = 1.0 / 9.0;
  w(nodes - 2, nodes - 2) = 8.0 / 9.0;
  return w;
}

Eigen::SparseMatrix<double> assembleW(const HybridMesh& mesh) {
  const int n1 = mesh.patch.n1(), n2 = mesh.patch.n2();
  const int n = n1 * n2;
  const bool d1 = mesh.mode == RedistributionMode::Full;
  const bool d2 = mesh.mode != RedistributionMode::None;
  const Eigen::MatrixXd W1 = d1 ? redistribution1D(n1, mesh.patch.knots1().spanCount())
                                : Eigen::MatrixXd::Identity(n1, n1);
  const Eigen::MatrixXd W2 = d2 ? redistribution1D(n2, mesh.patch.knots2().spanCount())
                                : Eigen::MatrixXd::Identity(n2, n2);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(n) * 2);
  for (int j1 = 0; j1 < n2; ++j1)
    for (int j2 = 0; j2 < n2; ++j2) {
      if (W2(j1, j2) == 0.0) continue;
      for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 0; i2 < n1; ++i2) {
          const double v = W1(i1, i2) * W2(j1, j2);
          if (v != 0.0) trip.emplace_back(i1 + n1 * j1, i2 + n1 * j2, v);
        }
    }
  Eigen::SparseMatrix<double> W(n, n);
  W.setFromTriplets(trip.begin(), trip.end());
  return W;
}

Eigen::VectorXd applyW(const Eigen::SparseMatrix<double>& W, const Eigen::VectorXd& v) {
  const int n = static_cast<int>(W.rows());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(3 * n);
  for (int c = 0; c < W.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(W, c); it; ++it)
      out.segment<3>(3 * it.row()) += it.value() * v.segment<3>(3 * c);
  return out;
}

Eigen::VectorXd applyWT(const Eigen::SparseMatrix<double>& W, const Eigen::VectorXd& v) {
  const int n = static_cast<int>(W.rows());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(3 * n);
  for (int c = 0; c < W.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(W, c); it; ++it)
      out.segment<3>(3 * c) += it.value() * v.segment<3>(3 * it.row());
  return out;
}

Eigen::SparseMatrix<double> expandBlocks(const Eigen::SparseMatrix<double>& W) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(3 * W.nonZeros());
  for (int c = 0; c < W.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(W, c); it; ++it)
      for (int d = 0; d < 3; ++d) trip.emplace_back(3 * it.row() + d, 3 * c + d, it.value());
  Eigen::SparseMatrix<double> out(3 * W.rows(), 3 * W.cols());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

}  // namespace klshell
