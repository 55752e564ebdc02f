#pragma once

#include "fedrl/agents/factory.hpp"
#include "fedrl/epi_env.hpp"
#include "fedrl/experiment/checkpoint.hpp"
#include "fedrl/experiment/config.hpp"
#include "fedrl/experiment/plot.hpp"
#include "fedrl/experiment/report.hpp"
#include "fedrl/experiment/runner.hpp"
#include "fedrl/federation.hpp"
#include "fedrl/metrics.hpp"
