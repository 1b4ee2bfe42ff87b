#pragma once

#include "kts/error.hpp"
#include "kts/features.hpp"
#include "kts/io.hpp"
#include "kts/kernel.hpp"
#include "kts/metrics.hpp"
#include "kts/oracle.hpp"
#include "kts/sampling.hpp"
#include "kts/segmentation.hpp"
#include "kts/solver.hpp"
#include "kts/synth.hpp"
#include "kts/variance_table.hpp"
