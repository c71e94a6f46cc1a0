#pragma once

// Umbrella header.

#include "bessel_core.hpp"
#include "diffusion_sim.hpp"
#include "error.hpp"
#include "gamma.hpp"
#include "kernels.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "specfun.hpp"
