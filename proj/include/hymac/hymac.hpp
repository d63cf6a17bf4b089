#ifndef HYMAC_HYMAC_HPP
#define HYMAC_HYMAC_HPP

#include "hymac/analytics.hpp"
#include "hymac/config.hpp"
#include "hymac/error.hpp"
#include "hymac/metrics.hpp"
#include "hymac/optimizer.hpp"
#include "hymac/oracles.hpp"
#include "hymac/parallel.hpp"
#include "hymac/population.hpp"
#include "hymac/priority.hpp"
#include "hymac/report.hpp"
#include "hymac/simulator.hpp"
#include "hymac/timing.hpp"
#include "hymac/validation.hpp"

#endif  // HYMAC_HYMAC_HPP
