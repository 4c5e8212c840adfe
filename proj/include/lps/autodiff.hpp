#pragma once

#include "lps/autodiff/affine.hpp"
#include "lps/autodiff/dual.hpp"
#include "lps/autodiff/elementary.hpp"
#include "lps/autodiff/jet.hpp"
#include "lps/autodiff/multi_index.hpp"
#include "lps/autodiff/tape.hpp"
#include "lps/autodiff/taylor.hpp"
#include "lps/autodiff/var.hpp"
