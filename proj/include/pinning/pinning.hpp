// Umbrella header for the numeric core (everything except JSON config / CSV
// plumbing, which live in config.hpp, csv.hpp, runner.hpp).
#pragma once

#include "pinning/disorder_chain.hpp"
#include "pinning/disorder_path.hpp"
#include "pinning/homogeneous.hpp"
#include "pinning/matrix.hpp"
#include "pinning/model_b.hpp"
#include "pinning/numeric.hpp"
#include "pinning/oracle.hpp"
#include "pinning/quenched.hpp"
#include "pinning/renewal_dp.hpp"
#include "pinning/renewal_kernel.hpp"
#include "pinning/rng.hpp"
#include "pinning/spectral.hpp"
