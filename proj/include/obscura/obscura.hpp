#pragma once

// Umbrella header for the obscura library.

#include "obscura/analytic_engine.hpp"
#include "obscura/attack_simulator.hpp"
#include "obscura/measure_catalog.hpp"
#include "obscura/report_io.hpp"
#include "obscura/rng.hpp"
#include "obscura/scenario_io.hpp"
#include "obscura/threat_model.hpp"
