// Convenience umbrella: pulls in the whole library.
#pragma once

#include "mospc/checkpoint.hpp"
#include "mospc/cmixup.hpp"
#include "mospc/common.hpp"
#include "mospc/dataset.hpp"
#include "mospc/losses.hpp"
#include "mospc/metrics.hpp"
#include "mospc/model.hpp"
#include "mospc/pairing.hpp"
#include "mospc/rng.hpp"
#include "mospc/trainer.hpp"
