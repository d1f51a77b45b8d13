#include "klshell/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace klshell {

KnotVector::KnotVector(int degree, std::vector<double> knots)
    : degree_(degree), knots_(std::move(knots)) {
  if (degree_ < 1) throw std::invalid_argument("knot vector: degree must be >= 1");
  const int nk = static_cast<int>(knots_.size());
  if (nk < 2 * (degree_ + 1)) throw std::invalid_argument("knot vector: too few knots");
  for (int i = 1; i < nk; ++i)
    if (knots_[i] < knots_[i - 1]) throw std::invalid_argument("knot vector: not nondecreasing");
  for (int i = 0; i <= degree_; ++i) {
    if (knots_[i] != knots_.front() || knots_[nk - 1 - i] != knots_.back())
      throw std::invalid_argument("knot vector: not open");
  }
  if (knots_[degree_ + 1] == knots_.front() || knots_[nk - degree_ - 2] == knots_.back())
    throw std::invalid_argument("knot vector: end knot repeated more than degree+1 times");

  breaks_.push_back(knots_.front());
  int mult = 0;
  for (int i = degree_ + 1; i < nk - degree_ - 1; ++i) {
    if (knots_[i] == breaks_.back()) {
      ++mult;
      if (mult > degree_) throw std::invalid_argument("knot vector: interior multiplicity > degree");
    } else {
      breaks_.push_back(knots_[i]);
      mult = 1;
    }
  }
  if (breaks_.back() != knots_.back()) breaks_.push_back(knots_.back());
}

KnotVector KnotVector::uniform(int degree, int spans, double a, double b) {
  if (spans < 1) throw std::invalid_argument("knot vector: spans must be >= 1");
  std::vector<double> k;
  k.reserve(spans + 2 * degree + 1);
  for (int i = 0; i <= degree; ++i) k.push_back(a);
  for (int i = 1; i < spans; ++i) k.push_back(a + (b - a) * i / spans);
  for (int i = 0; i <= degree; ++i) k.push_back(b);
  return KnotVector(degree, std::move(k));
}

int KnotVector::findSpan(double xi) const {
  const int n = nodeCount();
  if (xi >= knots_.back()) return n - 1;
  // binary search over [p, n]
  int lo = degree_, hi = n;
  while (lo + 1 < hi) {
    int mid = (lo + hi) / 2;
    if (xi < knots_[mid])
      hi = mid;
    else
      lo = mid;
  }
  return lo;
}

double KnotVector::greville(int i) const {
  double s = 0;
  for (int k = 1; k <= degree_; ++k) s += knots_[i + k];
  return s / degree_;
}

KnotVector::Basis KnotVector::evaluate(double xi) const {
  const double span01 = knots_.back() - knots_.front();
  if (xi < knots_.front() - 1e-12 * span01 || xi > knots_.back() + 1e-12 * span01)
    throw std::domain_error("basis evaluation outside knot range");
  xi = std::clamp(xi, knots_.front(), knots_.back());
  return evaluateInSpan(xi, findSpan(xi));
}

int KnotVector::elementSpan(int e) const {
  return findSpan(0.5 * (breaks_[e] + breaks_[e + 1]));
}

KnotVector::Basis KnotVector::evaluateInSpan(double xi, int span) const {
  const int p = degree_;
  Basis out;
  out.span = span;
  out.first = out.span - p;

  // Cox-de Boor triangle with stored knot differences, then the
  // derivative recurrences up to order 2.
  double ndu[6][6], left[6], right[6];
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = xi - knots_[out.span + 1 - j];
    right[j] = knots_[out.span + j] - xi;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  for (int j = 0; j <= p; ++j) out.N[j] = ndu[j][p];

  const int nder = std::min(2, p);
  double ders[3][6] = {};
  double a[2][6];
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a[0][0] = 1.0;
    for (int k = 1; k <= nder; ++k) {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = (rk >= -1) ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        d += a[s2][k] * ndu[r][pk];
      }
      ders[k][r] = d;
      std::swap(s1, s2);
    }
  }
  double fac = p;
  for (int k = 1; k <= nder; ++k) {
    for (int r = 0; r <= p; ++r) ders[k][r] *= fac;
    fac *= (p - k);
  }
  for (int r = 0; r <= p; ++r) {
    out.dN[r] = ders[1][r];
    out.d2N[r] = ders[2][r];
  }
  return out;
}

void bilinearShapes(double s, double t, SurfaceShapes& out) {
  out.count = 4;
  out.N.resize(4);
  out.dN.resize(4, 2);
  out.d2N.resize(4, 3);
  const double sm = 1.0 - s, sp = 1.0 + s, tm = 1.0 - t, tp = 1.0 + t;
  out.N << 0.25 * sm * tm, 0.25 * sp * tm, 0.25 * sm * tp, 0.25 * sp * tp;
  out.dN.col(0) << -0.25 * tm, 0.25 * tm, -0.25 * tp, 0.25 * tp;
  out.dN.col(1) << -0.25 * sm, -0.25 * sp, 0.25 * sm, 0.25 * sp;
  out.d2N.setZero();
  out.d2N.col(2) << 0.25, -0.25, -0.25, 0.25;
}

const GaussRule& gaussRule(int n) {
  static std::map<int, GaussRule> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) throw std::invalid_argument("gauss rule: n must be >= 1");

  GaussRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton on Legendre P_n, seeded with the Chebyshev estimate.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.points[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  std::sort(rule.points.begin(), rule.points.end());
  // recompute weights in sorted order
  for (int i = 0; i < n; ++i) {
    const double x = rule.points[i];
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    rule.weights[i] = (n == 1) ? 2.0 : 2.0 / ((1.0 - x * x) * dp * dp);
  }
  if (n == 1) {
    rule.points[0] = 0.0;
    rule.weights[0] = 2.0;
  }
  auto [pos, ok] = cache.emplace(n, std::move(rule));
  (void)ok;
  return pos->second;
}

}  // namespace klshell
