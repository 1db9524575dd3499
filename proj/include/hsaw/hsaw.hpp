#pragma once

#include "hsaw/bridges.hpp"
#include "hsaw/constants.hpp"
#include "hsaw/enumeration.hpp"
#include "hsaw/experiment.hpp"
#include "hsaw/io.hpp"
#include "hsaw/lattice.hpp"
#include "hsaw/pivot.hpp"
#include "hsaw/quadrature.hpp"
#include "hsaw/sle.hpp"
#include "hsaw/stats.hpp"
#include "hsaw/symmetry.hpp"
