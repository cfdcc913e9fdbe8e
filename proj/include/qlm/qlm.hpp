#pragma once

#include "qlm/half_int.hpp"
#include "qlm/model.hpp"
#include "qlm/gauge_basis.hpp"
#include "qlm/operators.hpp"
#include "qlm/propagator.hpp"
#include "qlm/observables.hpp"
#include "qlm/timeseries.hpp"
#include "qlm/analysis.hpp"
#include "qlm/quench.hpp"
#include "qlm/io.hpp"
