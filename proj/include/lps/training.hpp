#pragma once

#include "lps/training/adam.hpp"
#include "lps/training/evaluate.hpp"
#include "lps/training/losses.hpp"
#include "lps/training/trainer.hpp"
