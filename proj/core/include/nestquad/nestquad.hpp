#pragma once

#include "nestquad/error.hpp"
#include "nestquad/gauss.hpp"
#include "nestquad/gauss_newton.hpp"
#include "nestquad/nested_optimizer.hpp"
#include "nestquad/nested_problem.hpp"
#include "nestquad/orthopoly.hpp"
#include "nestquad/regularization.hpp"
#include "nestquad/rulestore.hpp"
#include "nestquad/sparse_grid.hpp"
