#pragma once

#include "lps/symmetry/criterion.hpp"
#include "lps/symmetry/prolong.hpp"
#include "lps/symmetry/vector_field.hpp"
