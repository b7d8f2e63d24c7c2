#pragma once

#include "hess2/grid.hpp"
#include "hess2/ineq.hpp"
#include "hess2/json_io.hpp"
#include "hess2/margin.hpp"
#include "hess2/probe.hpp"
#include "hess2/sampling.hpp"
#include "hess2/solver.hpp"
#include "hess2/symfun.hpp"
#include "hess2/version.hpp"
