#pragma once

#include "pfr/cost.hpp"
#include "pfr/experiments.hpp"
#include "pfr/model.hpp"
#include "pfr/pdecheck.hpp"
#include "pfr/quadrature.hpp"
#include "pfr/rng.hpp"
#include "pfr/signal.hpp"
#include "pfr/strategy.hpp"
