#pragma once

#include "digitstat/constructors.hpp"
#include "digitstat/digit_core.hpp"
#include "digitstat/errors.hpp"
#include "digitstat/rational.hpp"
#include "digitstat/simulation.hpp"
#include "digitstat/stats.hpp"
