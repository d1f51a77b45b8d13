#pragma once

#include <Eigen/Sparse>

#include "klshell/patch.hpp"

namespace klshell {

enum class Disc { B2M1, BpMp };
enum class RedistributionMode { None, Lateral, Full };

/// A shell discretization: the NURBS patch plus, for B2M1, the bilinear
/// membrane mesh sharing the same control net.
struct HybridMesh {
  NurbsPatch patch;
  M1Mesh m1;
  Disc disc = Disc::BpMp;
  RedistributionMode mode = RedistributionMode::None;
};

/// Pairs the patch with its control-net membrane mesh. B2M1 requires a
/// biquadratic patch; BpMp carries no membrane mesh and ignores `mode`.
HybridMesh buildHybrid(NurbsPatch patch, Disc disc,
                       RedistributionMode mode = RedistributionMode::None);

enum class RedistributionCase { Center, Edge, DoubleEdge, Corner, DoubleCorner };

/// The five elemental redistribution matrices (column-stochastic).
Eigen::MatrixXd localRedistribution(RedistributionCase c);

/// One-directional operator on a node line: identity in the interior,
/// boundary transfers matching the elemental cases. `spans` is the number of
/// NURBS elements along the direction.
Eigen::MatrixXd redistribution1D(int nodes, int spans);

/// Global scalar redistribution operator W (nodeCount x nodeCount), the
/// tensor product of the per-direction operators selected by `mesh.mode`.
Eigen::SparseMatrix<double> assembleW(const HybridMesh& mesh);

/// Blockwise application to stacked per-node 3-vectors: returns W v.
Eigen::VectorXd applyW(const Eigen::SparseMatrix<double>& W, const Eigen::VectorXd& v);
/// Returns W^T v (used for redistributed displacements and positions).
Eigen::VectorXd applyWT(const Eigen::SparseMatrix<double>& W, const Eigen::VectorXd& v);
/// Block expansion W (kron) I3 for congruence transforms of assembled matrices.
Eigen::SparseMatrix<double> expandBlocks(const Eigen::SparseMatrix<double>& W);

}  // namespace klshell
