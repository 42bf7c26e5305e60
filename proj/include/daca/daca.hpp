#pragma once

#include "daca/common.hpp"
#include "daca/config.hpp"
#include "daca/engine.hpp"
#include "daca/metrics.hpp"
#include "daca/provisioning.hpp"
#include "daca/qot.hpp"
#include "daca/routing.hpp"
#include "daca/schedule.hpp"
#include "daca/spectrum.hpp"
#include "daca/sweep.hpp"
#include "daca/topology.hpp"
#include "daca/traffic.hpp"
