#pragma once

#include "lps/data/burgers_solver.hpp"
#include "lps/data/dataset.hpp"
#include "lps/data/fft.hpp"
#include "lps/data/grid_jets.hpp"
#include "lps/data/initial_condition.hpp"
