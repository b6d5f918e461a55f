#pragma once

namespace sphot {

/// Knobs shared by every geometric routine.
///
/// Formulas for the exponential map, the distance Hessian and the
/// transport maps degenerate at the antipode.  Tangent vectors whose length
/// reaches `pi - cut_margin` are rejected instead of regularized.
struct GeometryConfig {
  double cut_margin = 1e-3;
};

}  // namespace sphot
