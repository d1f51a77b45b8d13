#pragma once

#include <Eigen/CholmodSupport>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>
#include <vector>

#include "klshell/element.hpp"
#include "klshell/hybrid.hpp"

namespace klshell {

struct DirichletBC {
  int node;
  int comp;
  double value = 0.0;
};

/// Equality constraint u[slave][comp] = u[master][comp] (shared unknown).
struct TieBC {
  int slave;
  int master;
  int comp;
};

enum class Edge { U0, U1, V0, V1 };

/// Node ids of a control row parallel to an edge; row 0 is the edge itself.
std::vector<int> edgeNodes(const NurbsPatch& patch, Edge edge, int row = 0);

void fixNodes(std::vector<DirichletBC>& bcs, const std::vector<int>& nodes, bool x, bool y,
              bool z, double value = 0.0);

struct Loads {
  Vec3 surface = Vec3::Zero();  // dead load per reference area on the patch
  struct EdgeTraction {
    Edge edge;
    Vec3 traction;  // per reference edge length
  };
  std::vector<EdgeTraction> tractions;
  struct PointLoad {
    int node;
    Vec3 force;
  };
  std::vector<PointLoad> points;
};

/// Node-block sparse symmetric matrix, lower node-triangle storage.
class BlockMatrix {
 public:
  void buildPattern(int nNodes, const std::vector<std::vector<int>>& stencils);
  void setZero();
  /// Requires row >= col by node id; diagonal blocks hold the full 3x3.
  void add(int row, int col, const Mat3& m);
  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;  // symmetric product

  int nodeCount() const { return n_; }
  const std::vector<int>& colPtr() const { return colPtr_; }
  const std::vector<int>& rowIdx() const { return rowIdx_; }
  const std::vector<Mat3>& blocks() const { return blocks_; }
  int slot(int row, int col) const;

 private:
  int n_ = 0;
  std::vector<int> colPtr_, rowIdx_;
  std::vector<Mat3> blocks_;
};

struct DofMap {
  int nNodes = 0;
  int nFree = 0;
  std::vector<int> index;         // 3n entries; >= 0 free index, -1 constrained
  std::vector<double> prescribed; // 3n entries
  void build(int nodes, const std::vector<DirichletBC>& bcs,
             const std::vector<TieBC>& ties = {});
};

struct NewtonOptions {
  int loadSteps = 10;
  double tolerance = 1e-10;  // relative residual
  int maxIterations = 30;
};

struct NewtonReport {
  bool converged = false;
  std::vector<int> iterations;                 // solves per load step
  std::vector<std::vector<double>> residuals;  // residual norms per step
};

/// Assembled shell problem on a hybrid mesh: stiffness/force evaluation,
/// constraint handling and the two solution drivers.
class ShellModel {
 public:
  struct PatchElement {
    int e1, e2;
    double u0, u1, v0, v1;
    std::vector<int> nodes;
  };
  struct MembraneElement {
    std::array<int, 4> conn;
    std::vector<int> ext;  // redistribution support (equals conn when identity)
    Eigen::MatrixXd P;     // ext.size() x 4
    bool identity = true;
    Eigen::Matrix<double, 3, 4> Xr;  // redistributed reference positions
  };

  ShellModel(HybridMesh mesh, KoiterMaterial mat);

  void setBoundaryConditions(std::vector<DirichletBC> bcs);
  void setTies(std::vector<TieBC> ties);
  void setLoads(Loads loads);
  void finalize();

  const HybridMesh& mesh() const { return mesh_; }
  const KoiterMaterial& material() const { return mat_; }
  const DofMap& dofs() const { return dofs_; }
  const Eigen::SparseMatrix<double>& redistribution() const { return W_; }
  int nodeCount() const { return mesh_.patch.nodeCount(); }

  const Eigen::VectorXd& externalForce() const { return fExt_; }

  /// Assembles the tangent and internal force at nodal displacements u (3n).
  void assemble(const Eigen::VectorXd& u, Regime regime);
  const Eigen::VectorXd& internalForce() const { return fInt_; }
  /// Accumulated element-force magnitudes; eps * |this| bounds the roundoff
  /// floor of the assembled residual.
  const Eigen::VectorXd& forceMagnitudes() const { return fAbs_; }

  /// Roundoff floor of the assembled residual at state u: the strain
  /// differences cancel position-scale terms, so the noise is
  /// eps * || abs(K) * (|X| + |u|) || over the free dofs.
  double residualFloor(const Eigen::VectorXd& u) const;
  const BlockMatrix& tangent() const { return K_; }
  /// Lower-triangular reduced tangent of the last assemble().
  const Eigen::SparseMatrix<double>& reducedTangent() const { return Kred_; }

  double internalEnergy(const Eigen::VectorXd& u, Regime regime) const;

  /// Direct solve of the linear problem; returns full nodal displacements.
  Eigen::VectorXd solveLinear();

  /// Load-stepped Newton iteration; u is the start vector and the result.
  NewtonReport solveNewton(const NewtonOptions& opts, Eigen::VectorXd& u);

  /// Reaction forces (f_int - loadFactor * f_ext) on constrained dofs.
  Eigen::VectorXd reactions(const Eigen::VectorXd& u, Regime regime, double loadFactor);

  /// Max |i-j| over nonzero dof pairs of the tangent pattern.
  int bandwidth() const;

  const std::vector<PatchElement>& patchElements() const { return patchElems_; }
  const std::vector<MembraneElement>& membraneElements() const { return membraneElems_; }

 private:
  void assembleExternal();
  void factorize();
  Eigen::VectorXd solveReduced(const Eigen::VectorXd& rhs);

  HybridMesh mesh_;
  KoiterMaterial mat_;
  std::vector<DirichletBC> bcs_;
  std::vector<TieBC> ties_;
  Loads loads_;
  bool finalized_ = false;

  DofMap dofs_;
  Eigen::SparseMatrix<double> W_;
  std::vector<PatchElement> patchElems_;
  std::vector<MembraneElement> membraneElems_;
  ElementKind patchKind_ = ElementKind::Full;

  BlockMatrix K_;
  Eigen::VectorXd fInt_, fExt_, fAbs_;

  // reduced system bookkeeping
  Eigen::SparseMatrix<double> Kred_;
  std::vector<int> valueTarget_;      // slot*9 + bc*3 + br -> csc offset or -1
  std::vector<signed char> valueWeight_;  // 2 where a tied pair folds onto a diagonal
  // supernodal Cholesky when the tangent is definite, with a simplicial
  // LDLT fallback for indefinite intermediate Newton states
  Eigen::CholmodSupernodalLLT<Eigen::SparseMatrix<double>, Eigen::Lower> llt_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> ldlt_;
  bool analyzed_ = false;
  bool ldltAnalyzed_ = false;
  bool usingFallback_ = false;
};

}  // namespace klshell
