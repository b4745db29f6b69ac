#pragma once

#include "swapsim/analysis.hpp"
#include "swapsim/config.hpp"
#include "swapsim/detectors.hpp"
#include "swapsim/diagnostics.hpp"
#include "swapsim/errors.hpp"
#include "swapsim/inference.hpp"
#include "swapsim/numerics.hpp"
#include "swapsim/oracle.hpp"
#include "swapsim/sources.hpp"
#include "swapsim/swapstate.hpp"
