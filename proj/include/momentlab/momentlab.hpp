#pragma once

#include "bessel.hpp"
#include "bump.hpp"
#include "characters.hpp"
#include "core_arith.hpp"
#include "error.hpp"
#include "gamma.hpp"
#include "gl3.hpp"
#include "io.hpp"
#include "large_sieve.hpp"
#include "mellin.hpp"
#include "moment.hpp"
#include "quadrature.hpp"
#include "voronoi.hpp"
