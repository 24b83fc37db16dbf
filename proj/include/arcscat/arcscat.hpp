#pragma once

// Umbrella header: full library surface.

#include "core.hpp"
#include "special.hpp"
#include "logquad.hpp"
#include "chebyshev.hpp"
#include "geometry.hpp"
#include "linalg.hpp"
#include "forward.hpp"
#include "lowfreq.hpp"
#include "frechet.hpp"
#include "inversion.hpp"
#include "sampling.hpp"
#include "io.hpp"
