#pragma once

#include <array>
#include <vector>

#include "klshell/types.hpp"

namespace klshell {

/// Open knot vector for one parametric direction.
class KnotVector {
 public:
  KnotVector() = default;
  KnotVector(int degree, std::vector<double> knots);

  /// Open vector on [a,b] with `spans` equal nonzero spans.
  static KnotVector uniform(int degree, int spans, double a = 0.0, double b = 1.0);

  int degree() const { return degree_; }
  const std::vector<double>& knots() const { return knots_; }
  double front() const { return knots_.front(); }
  double back() const { return knots_.back(); }

  /// Number of basis functions (nodes along this direction).
  int nodeCount() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
  /// Number of nonzero spans (elements along this direction).
  int spanCount() const { return static_cast<int>(breaks_.size()) - 1; }

  /// Distinct knot values (element boundaries).
  const std::vector<double>& breakpoints() const { return breaks_; }

  /// Knot span index such that knots[span] <= xi < knots[span+1].
  int findSpan(double xi) const;

  /// Greville abscissa of node i: mean of knots i+1 .. i+p.
  double greville(int i) const;

  struct Basis {
    int span = 0;   // knot span index
    int first = 0;  // index of first supported node
    std::array<double, 6> N{}, dN{}, d2N{};
  };

  /// Values and first/second derivatives of the p+1 nonzero functions at xi.
  /// Throws std::domain_error if xi lies outside the knot range.
  Basis evaluate(double xi) const;

  /// Same, but on the polynomial extension of a chosen span; used to take
  /// one-sided limits at element boundaries.
  Basis evaluateInSpan(double xi, int span) const;

  /// Knot span index of element e (ordinal among nonzero spans).
  int elementSpan(int e) const;

 private:
  int degree_ = 0;
  std::vector<double> knots_;
  std::vector<double> breaks_;
};

/// Tensor-product shape values at one parametric point. Node ordering runs
/// xi1 fastest. Second-derivative columns are ordered (11, 22, 12).
struct SurfaceShapes {
  int count = 0;
  std::array<int, kMaxBasis> nodes{};
  Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxBasis, 1> N;
  Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::ColMajor, kMaxBasis, 2> dN;
  Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::ColMajor, kMaxBasis, 3> d2N;
};

/// Bilinear Lagrange shapes on [-1,1]^2; corner order (-1,-1),(1,-1),(-1,1),(1,1).
void bilinearShapes(double s, double t, SurfaceShapes& out);

struct GaussRule {
  std::vector<double> points;   // on [-1,1]
  std::vector<double> weights;  // sum to 2
};

/// Gauss-Legendre rule with n points, cached per order.
const GaussRule& gaussRule(int n);

}  // namespace klshell
