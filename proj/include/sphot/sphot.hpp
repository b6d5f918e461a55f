#pragma once

// Umbrella header for the numerical core (no JSON dependency).

#include "sphot/config.hpp"
#include "sphot/errors.hpp"
#include "sphot/numeric/gauss_legendre.hpp"
#include "sphot/numeric/jet.hpp"
#include "sphot/numeric/special.hpp"
#include "sphot/sphere/geometry.hpp"
#include "sphot/sphere/green.hpp"
#include "sphot/sphere/types.hpp"
#include "sphot/fields/c_transform.hpp"
#include "sphot/fields/grid.hpp"
#include "sphot/fields/random.hpp"
#include "sphot/fields/scalar_field.hpp"
#include "sphot/fields/sources.hpp"
#include "sphot/transport/green_bound.hpp"
#include "sphot/transport/measure.hpp"
#include "sphot/transport/wasserstein.hpp"
#include "sphot/entropy/carleman.hpp"
#include "sphot/entropy/formula.hpp"
#include "sphot/entropy/k_function.hpp"
#include "sphot/entropy/relative_entropy.hpp"
#include "sphot/jacobi/curvature.hpp"
#include "sphot/jacobi/lichnerowicz.hpp"
#include "sphot/jacobi/matrix_trig.hpp"
#include "sphot/jacobi/solver.hpp"
