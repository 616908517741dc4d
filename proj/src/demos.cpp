#include "dyntomo/demos.hpp"

#include <stdexcept>

namespace dyntomo::demos {

SystemModeld cyclic() { return cyclic_example(); }

SystemModeld random6(std::uint64_t seed) {
  Matrixd P = Matrixd::Zero(2, 6);
  P(0, 0) = 1.0;
  P(1, 1) = 1.0;
  auto sys = make_system(random_dynamics(6, seed), std::move(P));
  sys.label = "random6";
  return sys;
}

SystemModeld l1grid() {
  GridSpec grid{10};
  Matrixd L = column_shift(grid, 1) * variable_diffusion(grid);
  auto sys = make_system(std::move(L), column_sum_projection(grid));
  sys.label = "l1grid";
  sys.grid = grid;
  return sys;
}

SystemModeld l2grid() {
  GridSpec grid{10};
  auto sys = make_system(variable_diffusion(grid),
                         column_sum_projection(grid));
  sys.label = "l2grid";
  sys.grid = grid;
  return sys;
}

SystemModeld by_name(const std::string& name, std::uint64_t seed) {
  if (name == "cyclic") return cyclic();
  if (name == "random6") return random6(seed);
  if (name == "l1grid") return l1grid();
  if (name == "l2grid") return l2grid();
  throw std::invalid_argument("unknown demo '" + name + "' (expected " +
                              kNames + ")");
}

}  // namespace dyntomo::demos
