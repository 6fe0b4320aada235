// cavityqed.hpp — everything at once

#pragma once

#include "cavityqed/atom.hpp"
#include "cavityqed/chainmap.hpp"
#include "cavityqed/config.hpp"
#include "cavityqed/csv.hpp"
#include "cavityqed/errors.hpp"
#include "cavityqed/fock.hpp"
#include "cavityqed/grid.hpp"
#include "cavityqed/hamiltonians.hpp"
#include "cavityqed/linalg.hpp"
#include "cavityqed/modes.hpp"
#include "cavityqed/mps.hpp"
#include "cavityqed/observables.hpp"
#include "cavityqed/scenarios.hpp"
