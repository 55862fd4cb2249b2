#ifndef CESR_CESR_HPP
#define CESR_CESR_HPP

#include "cesr/commands.hpp"
#include "cesr/config.hpp"
#include "cesr/csv.hpp"
#include "cesr/energy.hpp"
#include "cesr/error.hpp"
#include "cesr/experiment.hpp"
#include "cesr/metrics.hpp"
#include "cesr/mobility.hpp"
#include "cesr/rng.hpp"
#include "cesr/routing.hpp"
#include "cesr/scenario.hpp"
#include "cesr/sim.hpp"
#include "cesr/text.hpp"
#include "cesr/types.hpp"

#endif // CESR_CESR_HPP
