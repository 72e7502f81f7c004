// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header for the ckmsim library.

#pragma once

#include "ckm/alignment.hpp"
#include "ckm/bim.hpp"
#include "ckm/channel.hpp"
#include "ckm/channel_paths.hpp"
#include "ckm/errors.hpp"
#include "ckm/geometry.hpp"
#include "ckm/harness.hpp"
#include "ckm/json_io.hpp"
#include "ckm/phased_array.hpp"
#include "ckm/presets.hpp"
#include "ckm/rng.hpp"
#include "ckm/sensors.hpp"
