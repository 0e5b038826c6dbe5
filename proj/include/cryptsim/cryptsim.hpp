#pragma once

#include "analysis.hpp"
#include "cell_type.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "lattice.hpp"
#include "mathml.hpp"
#include "network.hpp"
#include "occupancy.hpp"
#include "rng.hpp"
#include "sbml.hpp"
#include "sim.hpp"
#include "snapshot.hpp"
#include "trajectory.hpp"
