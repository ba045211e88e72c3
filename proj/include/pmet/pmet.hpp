#ifndef PMET_PMET_HPP
#define PMET_PMET_HPP

#include "pmet/error.hpp"
#include "pmet/ext_real.hpp"
#include "pmet/fixpoint.hpp"
#include "pmet/liftings.hpp"
#include "pmet/pseudometric.hpp"
#include "pmet/systems.hpp"
#include "pmet/traces.hpp"
#include "pmet/transport.hpp"
#include "pmet/verification.hpp"

#endif
