#pragma once

// Umbrella header.

#include "autodiff.hpp"
#include "bottleneck.hpp"
#include "classes.hpp"
#include "common.hpp"
#include "curve.hpp"
#include "dp_oracle.hpp"
#include "expr.hpp"
#include "geodesic.hpp"
#include "index.hpp"
#include "io.hpp"
#include "lamination.hpp"
#include "metric.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "stable_norm.hpp"
#include "svg.hpp"
#include "sweepout.hpp"
#include "width.hpp"
