#pragma once

// Umbrella header for the swsys library.

#include "swsys/certificate.hpp"
#include "swsys/csv.hpp"
#include "swsys/expr.hpp"
#include "swsys/family.hpp"
#include "swsys/numeric.hpp"
#include "swsys/ratefn.hpp"
#include "swsys/report.hpp"
#include "swsys/signal.hpp"
#include "swsys/sim.hpp"
