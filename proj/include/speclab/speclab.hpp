#pragma once

/// Umbrella header for the spectral-algorithm learning-curve library.

#include "rational.hpp"
#include "rng.hpp"
#include "sphere.hpp"
#include "kernel.hpp"
#include "filter.hpp"
#include "target.hpp"
#include "risk.hpp"
#include "theory.hpp"
#include "theory_checks.hpp"
#include "harness.hpp"
