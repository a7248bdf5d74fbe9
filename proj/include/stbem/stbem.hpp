// SPDX-License-Identifier: Apache-2.0
//
// stbem -- spatial-temporal basis expansion channel estimation toolkit
//
// Umbrella header.

#ifndef STBEM_STBEM_HPP
#define STBEM_STBEM_HPP

#include "stbem/channel.hpp"
#include "stbem/config.hpp"
#include "stbem/errors.hpp"
#include "stbem/experiments.hpp"
#include "stbem/linalg.hpp"
#include "stbem/metrics.hpp"
#include "stbem/model.hpp"
#include "stbem/report.hpp"
#include "stbem/rng.hpp"
#include "stbem/training.hpp"

#endif  // STBEM_STBEM_HPP
