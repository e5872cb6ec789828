#pragma once

// Umbrella header: higher-order Laplace-method asymptotics for
// I(t) = int_a^b exp(t*h(x)) g(x) dx, with a quadrature oracle and the
// asymptotic-vs-Simpson error comparison.

#include "laplasym/errors.hpp"
#include "laplasym/expr.hpp"
#include "laplasym/jet.hpp"
#include "laplasym/analysis.hpp"
#include "laplasym/asymptotics.hpp"
#include "laplasym/quadrature.hpp"
#include "laplasym/compare.hpp"
