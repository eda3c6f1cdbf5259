#pragma once

#include "tanglescope/error.hpp"
#include "tanglescope/linalg.hpp"
#include "tanglescope/spectral.hpp"
#include "tanglescope/entanglement.hpp"
#include "tanglescope/union_find.hpp"
#include "tanglescope/clusters.hpp"
#include "tanglescope/correlators.hpp"
#include "tanglescope/signatures.hpp"
#include "tanglescope/susceptibility.hpp"
#include "tanglescope/random.hpp"
#include "tanglescope/scaling.hpp"
#include "tanglescope/config.hpp"
#include "tanglescope/sweep.hpp"
