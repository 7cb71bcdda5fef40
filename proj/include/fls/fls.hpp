#pragma once

#include "fls/bench.hpp"
#include "fls/datagen.hpp"
#include "fls/exact.hpp"
#include "fls/io.hpp"
#include "fls/path.hpp"
#include "fls/problem.hpp"
#include "fls/prox.hpp"
#include "fls/reduce.hpp"
#include "fls/screening.hpp"
#include "fls/solver.hpp"
#include "fls/types.hpp"
