#pragma once

#include "errors.hpp"
#include "rng.hpp"
#include "parallel.hpp"
#include "spectral.hpp"
#include "graph.hpp"
#include "sampling.hpp"
#include "imatgi.hpp"
#include "baselines.hpp"
#include "signals.hpp"
#include "recsys.hpp"
#include "experiments.hpp"
