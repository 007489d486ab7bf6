#pragma once

// Umbrella header.

#include "core.hpp"
#include "numerics.hpp"
#include "kernels.hpp"
#include "laws.hpp"
#include "models.hpp"
#include "analysis.hpp"
#include "reference_fd.hpp"
#include "packed_bed.hpp"
#include "config.hpp"
#include "driver.hpp"
