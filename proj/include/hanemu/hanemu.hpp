#pragma once

#include "hanemu/domain.hpp"
#include "hanemu/error.hpp"
#include "hanemu/lmu.hpp"
#include "hanemu/metering.hpp"
#include "hanemu/protocol.hpp"
#include "hanemu/report.hpp"
#include "hanemu/scenario.hpp"
#include "hanemu/simnet.hpp"
#include "hanemu/sln.hpp"
