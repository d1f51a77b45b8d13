#pragma once

#include "klshell/patch.hpp"

namespace klshell {

/// 90-degree cantilever arc strip: radius R about the e2 axis, width L along e2.
/// Direction 1 runs along the arc (m elements), direction 2 across the width
/// (one element of the given degree). Geometry is an exact circular cylinder.
NurbsPatch makeCantilever(double R, double L, int m, int p = 2);

/// 80-degree cylinder roof segment, radius 25, length 50 along e2,
/// meshed m x 1.5m. Requires even m >= 2.
NurbsPatch makeScordelis(int m, int p = 2);

/// Quarter of a hemisphere (radius 10) with an 18-degree polar hole,
/// meshed m x m. Direction 1 is the azimuth, direction 2 runs from the
/// equator up to the hole edge. Exact sphere section.
NurbsPatch makeHemisphere(int m, int p = 2);

/// In-place mesh distortion of the roof: shifts control point Y-coordinates
/// by 5 sin(pi X / (2 Xmax)) sin(pi Y / L); X and Z are unchanged.
void applySkew(NurbsPatch& patch);

/// Insert a knot into one direction (dir 0 or 1) without changing the surface.
NurbsPatch insertKnot(const NurbsPatch& patch, int dir, double value);

/// Refine one direction to uniform breakpoints with the given span count.
NurbsPatch refineUniform(const NurbsPatch& patch, int dir, int spans);

/// Raise the polynomial degree of both directions; the surface mapping is
/// preserved. Single-span directions use exact Bezier elevation, multi-span
/// directions a collocation projection onto the elevated space.
NurbsPatch degreeElevate(const NurbsPatch& patch, int pTarget);

}  // namespace klshell
