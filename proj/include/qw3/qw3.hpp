#pragma once

#include "qw3/errors.hpp"
#include "qw3/linalg.hpp"
#include "qw3/dispersion.hpp"
#include "qw3/coins.hpp"
#include "qw3/spectrum.hpp"
#include "qw3/kinematics.hpp"
#include "qw3/quadrature.hpp"
#include "qw3/trapping.hpp"
#include "qw3/simulator.hpp"
