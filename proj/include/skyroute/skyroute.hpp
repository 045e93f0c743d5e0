#pragma once

#include "skyroute/bench.hpp"
#include "skyroute/congestion.hpp"
#include "skyroute/energy.hpp"
#include "skyroute/error.hpp"
#include "skyroute/geo.hpp"
#include "skyroute/io.hpp"
#include "skyroute/model.hpp"
#include "skyroute/plan.hpp"
#include "skyroute/rng.hpp"
#include "skyroute/select.hpp"
#include "skyroute/wind.hpp"
