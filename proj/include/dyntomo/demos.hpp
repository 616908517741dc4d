#pragma once

#include "dyntomo/dynamics.hpp"

#include <cstdint>
#include <string>

namespace dyntomo::demos {

inline constexpr const char* kNames = "cyclic|random6|l1grid|l2grid";

// Six-state cyclic shift observed through its first two coordinates.
SystemModeld cyclic();

// Dense Gaussian dynamics on six states, same two-coordinate projection.
SystemModeld random6(std::uint64_t seed = 7);

// 10x10 transport-diffusion grid observed through column sums: spatially
// varying diffusion composed with a one-column cyclic shift.
SystemModeld l1grid();

// Same grid and observation, diffusion only (no advection).
SystemModeld l2grid();

// Dispatch by demo name; unknown names throw std::invalid_argument.
// `seed` only affects random6.
SystemModeld by_name(const std::string& name, std::uint64_t seed = 7);

}  // namespace dyntomo::demos
