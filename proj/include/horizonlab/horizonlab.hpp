#pragma once

#include "horizonlab/coordinates.hpp"
#include "horizonlab/duality.hpp"
#include "horizonlab/dynamics.hpp"
#include "horizonlab/horizons.hpp"
#include "horizonlab/integrals.hpp"
#include "horizonlab/model.hpp"
#include "horizonlab/near_horizon.hpp"
#include "horizonlab/series.hpp"
