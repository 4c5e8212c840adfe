#pragma once

#include <stdexcept>
#include <string>

#include "lps/pdes/burgers.hpp"
#include "lps/pdes/heat.hpp"
#include "lps/pdes/pde_system.hpp"

namespace lps::pdes {

/// "heat" or "burgers".
inline PdeSystem<2> make_pde(const std::string& name, double nu) {
  if (name == "heat") return heat(nu);
  if (name == "burgers") return burgers(nu);
  throw std::invalid_argument("unknown PDE '" + name + "' (expected heat or burgers)");
}

}  // namespace lps::pdes
