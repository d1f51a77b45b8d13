#pragma once

#include "klshell/material.hpp"

namespace klshell {

/// Which energy contributions an element carries.
enum class ElementKind { Bending, Membrane, Full };

enum class Regime { Linear, Nonlinear };

/// Covariant second-derivative array per node: out[i](a,b) = N_{i,ab} - Gamma^g_ab N_{i,g}.
void covariantSecondDerivative(const SurfaceShapes& sh, const double gamma[2][2][2], Mat2* out);

struct PointEval {
  SurfaceState ref;
  SurfaceState cur;  // equals ref in the linear regime
  StrainState strain;
  StressState stress;
  double J = 1.0;
};

/// Kinematics and stresses at one quadrature point. Shape derivatives and the
/// nodal blocks must share the same (local) parametric coordinates.
PointEval evaluatePoint(const SurfaceShapes& sh, const NodeBlock& Xe, const NodeBlock& xe,
                        const KoiterMaterial& mat, Regime regime);

/// Adds one quadrature point's internal-force / tangent / energy contribution.
/// Any of the outputs may be null. In the linear regime the force output is
/// the consistent product (material stiffness) * u and the geometric
/// stiffness vanishes.
void accumulatePoint(const SurfaceShapes& sh, double gaussWeight, const NodeBlock& Xe,
                     const NodeBlock& xe, const KoiterMaterial& mat, ElementKind kind,
                     Regime regime, Eigen::VectorXd* f, Eigen::MatrixXd* k, double* energy);

}  // namespace klshell
