// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hrris/scenario.hpp"
#include "hrris/rng.hpp"
#include "hrris/channel.hpp"
#include "hrris/rates.hpp"
#include "hrris/optimizer.hpp"
#include "hrris/harness.hpp"
