#pragma once

#include "pmet/contraction.hpp"
#include "pmet/convergence.hpp"
#include "pmet/core.hpp"
#include "pmet/errors.hpp"
#include "pmet/serialize.hpp"
#include "pmet/solver.hpp"
#include "pmet/spaces.hpp"
#include "pmet/witness.hpp"
