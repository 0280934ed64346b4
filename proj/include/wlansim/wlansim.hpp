#pragma once

#include "wlansim/channel.hpp"
#include "wlansim/lba.hpp"
#include "wlansim/metrics.hpp"
#include "wlansim/report.hpp"
#include "wlansim/run_command.hpp"
#include "wlansim/scenario.hpp"
#include "wlansim/sim.hpp"
#include "wlansim/topology.hpp"
