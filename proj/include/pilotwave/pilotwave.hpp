#pragma once

#include "pilotwave/classical.hpp"
#include "pilotwave/config.hpp"
#include "pilotwave/currents.hpp"
#include "pilotwave/dirac.hpp"
#include "pilotwave/dynamics.hpp"
#include "pilotwave/ensemble.hpp"
#include "pilotwave/error.hpp"
#include "pilotwave/field_history.hpp"
#include "pilotwave/geometry.hpp"
#include "pilotwave/interpolation.hpp"
#include "pilotwave/io.hpp"
#include "pilotwave/klein_gordon.hpp"
#include "pilotwave/lattice.hpp"
#include "pilotwave/regularized_density.hpp"
#include "pilotwave/runner.hpp"
#include "pilotwave/source.hpp"
#include "pilotwave/stress_energy.hpp"
