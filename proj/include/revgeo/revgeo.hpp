#ifndef REVGEO_REVGEO_HPP
#define REVGEO_REVGEO_HPP

#include "revgeo/error.hpp"
#include "revgeo/surface.hpp"
#include "revgeo/dynamics.hpp"
#include "revgeo/reduced.hpp"
#include "revgeo/quadrature.hpp"
#include "revgeo/closed.hpp"
#include "revgeo/bvp.hpp"
#include "revgeo/flat_torus.hpp"
#include "revgeo/central_force.hpp"

#endif  // REVGEO_REVGEO_HPP
