#pragma once

// Umbrella header for the full toolkit.

#include "dyntomo/core.hpp"
#include "dyntomo/rng.hpp"
#include "dyntomo/subspace.hpp"
#include "dyntomo/dynamics.hpp"
#include "dyntomo/null_chain.hpp"
#include "dyntomo/observability.hpp"
#include "dyntomo/experiments.hpp"
