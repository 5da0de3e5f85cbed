#pragma once

// Umbrella header.

#include "dtsesn/analysis.hpp"
#include "dtsesn/config.hpp"
#include "dtsesn/csv.hpp"
#include "dtsesn/errors.hpp"
#include "dtsesn/experiment.hpp"
#include "dtsesn/linalg.hpp"
#include "dtsesn/metrics.hpp"
#include "dtsesn/model_io.hpp"
#include "dtsesn/reservoir.hpp"
#include "dtsesn/rng.hpp"
#include "dtsesn/svg.hpp"
#include "dtsesn/systems.hpp"
