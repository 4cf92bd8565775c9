// Umbrella header.
#pragma once

#include "analysis.hpp"
#include "config.hpp"
#include "constraints.hpp"
#include "fft.hpp"
#include "field.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "kernel.hpp"
#include "operator.hpp"
#include "problems.hpp"
#include "solver.hpp"
