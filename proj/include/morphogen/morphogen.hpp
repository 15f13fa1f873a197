#pragma once

#include "morphogen/engine.hpp"
#include "morphogen/error.hpp"
#include "morphogen/explorer.hpp"
#include "morphogen/geometry.hpp"
#include "morphogen/grid.hpp"
#include "morphogen/metrics.hpp"
#include "morphogen/network.hpp"
#include "morphogen/optimizer.hpp"
#include "morphogen/random.hpp"
#include "morphogen/scenario.hpp"
#include "morphogen/segregation.hpp"
