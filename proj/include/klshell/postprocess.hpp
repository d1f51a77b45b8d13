#pragma once

#include <functional>
#include <string>

#include "klshell/solver.hpp"

namespace klshell {

/// One sampled point of the recovered solution fields. Stress tensors carry
/// physical components in the local orthonormal surface frame; `cauchy` is
/// generally unsymmetric.
struct FieldSample {
  int elem = 0;
  double xi1 = 0, xi2 = 0;  // patch parameters (patch) or local coords (M1)
  Vec3 x = Vec3::Zero();
  Vec3 u = Vec3::Zero();
  Mat2 sigma = Mat2::Zero();
  Mat2 couple = Mat2::Zero();
  Mat2 cauchy = Mat2::Zero();
  int surface = 0;  // 0 = patch, 1 = M1
};

/// Location of a point on the membrane mesh.
struct M1Point {
  int elem;
  double s, t;
};

/// Orthonormal in-plane frame rows F(i,.) = e_i . a_alpha; physical
/// components of a contravariant tensor are F T F^T.
Mat2 physicalFrame(const SurfaceState& state);

/// Post-processing bound to a solved configuration.
class Recovery {
 public:
  Recovery(const ShellModel& model, const Eigen::VectorXd& u, Regime regime);

  /// Normal projection of a patch point onto the membrane mesh. Throws if no
  /// intersection exists within twice the control-net spacing.
  M1Point projectToM1(double xi1, double xi2) const;

  /// sigma sampled on its carrying surface (M1 for B2M1, the patch else).
  std::vector<FieldSample> rawMembrane(int grid = 8) const;
  /// M sampled on the patch.
  std::vector<FieldSample> rawBending(int grid = 8) const;
  /// N on the patch (sigma pulled through the normal projection for B2M1);
  /// samples also carry the projected sigma and pointwise M.
  std::vector<FieldSample> rawCauchy(int grid = 8) const;
  /// Procedure with corner values: sigma at patch element corners, M (and the
  /// curvature) averaged there, all fields interpolated bilinearly. B2M1 only.
  std::vector<FieldSample> interpolated(int grid = 8) const;
  /// One sigma value per membrane element at its parametric center. B2M1 only.
  std::vector<FieldSample> constantMembrane() const;

  // pointwise evaluation
  struct MembranePoint {
    Mat2 sigmaPhys;
    Vec3 x, u;
    SurfaceState state;  // configuration carrying the components
  };
  MembranePoint membraneAt(int m1elem, double s, double t) const;

  struct PatchPoint {
    Mat2 couplePhys;
    Mat2 sigmaPhys;       // own-surface membrane stress (meaningful for BpMp)
    Mat2 momentTermPhys;  // M^{ag} b^b_g in physical components
    Vec3 x, u;
  };
  PatchPoint patchAt(double xi1, double xi2) const;
  PatchPoint patchAtInSpan(double xi1, double xi2, int span1, int span2) const;

  /// Corner-value grids of the interpolation procedure (B2M1 only):
  /// sigma projected at the corners, M and the moment term averaged over the
  /// adjacent elements, N combined from them.
  struct CornerField {
    int n1 = 0, n2 = 0;  // corners per direction
    std::vector<Mat2> sigma, couple, cauchy;
    Mat2 at(const std::vector<Mat2>& v, int e1, int e2, double s, double t) const;
  };
  CornerField cornerValues() const;

  const ShellModel& model() const { return model_; }
  Regime regime() const { return regime_; }
  const Eigen::VectorXd& solution() const { return u_; }

 private:
  PatchPoint patchFromShapes(const SurfaceShapes& sh) const;

  const ShellModel& model_;
  Eigen::VectorXd u_;
  Regime regime_;
  std::vector<double> grev1_, grev2_;
};

/// Reference fields as functions of the reference position, physical frame.
struct ReferenceFields {
  std::function<Vec3(const Vec3&)> displacement;
  std::function<Mat2(const Vec3&)> sigma;
  std::function<Mat2(const Vec3&)> couple;
  std::function<Mat2(const Vec3&)> cauchy;
};

struct ErrorNorms {
  double u = 0, sigma = 0, couple = 0, cauchy = 0;
};

/// Relative L2 errors: u, M, N integrated over the patch, sigma over its
/// carrying surface. `interpolatedCauchy` switches N to the corner-value
/// interpolation.
ErrorNorms errorNorms(const Recovery& rec, const ReferenceFields& ref,
                      bool interpolatedCauchy = false);

/// Scalar extrema of a selected physical component over samples.
struct Extrema {
  double min = 0, max = 0;
};
Extrema componentExtrema(const std::vector<FieldSample>& samples, const Mat2 FieldSample::*field,
                         int ci, int cj);

/// Per-element oscillation measure: max over elements of max|f - mean(f)|
/// within the element, for the selected component.
double oscillationMetric(const std::vector<FieldSample>& samples,
                         const Mat2 FieldSample::*field, int ci, int cj);

/// CSV export; the scalar columns carry the (ci,cj) physical component.
void exportCsv(const std::vector<FieldSample>& samples, const std::string& path, int ci = 0,
               int cj = 0);
/// VTK legacy unstructured-grid export; `grid` must match the sampling grid.
void exportVtk(const std::vector<FieldSample>& samples, const std::string& path, int grid,
               int ci = 0, int cj = 0);

/// Displacement interpolated at a patch parametric point.
Vec3 displacementAt(const NurbsPatch& patch, const Eigen::VectorXd& u, double xi1, double xi2);

}  // namespace klshell
