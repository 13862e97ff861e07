#pragma once

#include "bnlab/errors.hpp"
#include "bnlab/quadrature.hpp"
#include "bnlab/constants.hpp"
#include "bnlab/sphere.hpp"
#include "bnlab/bubbles.hpp"
#include "bnlab/green_ball.hpp"
#include "bnlab/ode.hpp"
#include "bnlab/spline.hpp"
#include "bnlab/radial_solver.hpp"
#include "bnlab/fit.hpp"
#include "bnlab/asymptotics.hpp"
#include "bnlab/decomposition.hpp"
#include "bnlab/linearization.hpp"
