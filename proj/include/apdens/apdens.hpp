#pragma once

#include "apdens/bench.hpp"
#include "apdens/config.hpp"
#include "apdens/constraint_handling.hpp"
#include "apdens/io.hpp"
#include "apdens/mutation.hpp"
#include "apdens/parameter_adaptation.hpp"
#include "apdens/population_control.hpp"
#include "apdens/problem.hpp"
#include "apdens/rng.hpp"
#include "apdens/solver.hpp"
