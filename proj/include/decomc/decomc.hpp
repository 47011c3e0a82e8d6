// decomc.hpp - umbrella header

#pragma once

#include "decomc/bath.hpp"
#include "decomc/config.hpp"
#include "decomc/errors.hpp"
#include "decomc/fock.hpp"
#include "decomc/micro.hpp"
#include "decomc/quadrature.hpp"
#include "decomc/scenario.hpp"
#include "decomc/special.hpp"
#include "decomc/thermal.hpp"
#include "decomc/thermo.hpp"
#include "decomc/version.hpp"
