#pragma once

// Convex matrix-valued functions under the semidefinite order: construction
// by convexity-preserving rules, subgradient calculus, exact univariate
// subdifferential intervals, Clarke-style gradient sampling, and
// verification oracles.

#include "matconv/atoms.hpp"
#include "matconv/eigen.hpp"
#include "matconv/errors.hpp"
#include "matconv/expr.hpp"
#include "matconv/oracle.hpp"
#include "matconv/order.hpp"
#include "matconv/repro.hpp"
#include "matconv/rng.hpp"
#include "matconv/spec_io.hpp"
#include "matconv/subgrad.hpp"
#include "matconv/symmat.hpp"
