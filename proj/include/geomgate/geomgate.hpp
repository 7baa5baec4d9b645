#pragma once

// Umbrella header for the geomgate library.

#include "geomgate/config.hpp"
#include "geomgate/dynamics.hpp"
#include "geomgate/errors.hpp"
#include "geomgate/fock.hpp"
#include "geomgate/gate.hpp"
#include "geomgate/geompath.hpp"
#include "geomgate/linalg.hpp"
#include "geomgate/model.hpp"
#include "geomgate/sweep.hpp"
#include "geomgate/verify.hpp"
#include "geomgate/version.hpp"
