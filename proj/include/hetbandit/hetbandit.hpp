#pragma once

// Multi-agent UCB bandits on multi-star graphs with probabilistic broadcasting.

#include "hetbandit/analysis.hpp"
#include "hetbandit/config.hpp"
#include "hetbandit/environment.hpp"
#include "hetbandit/errors.hpp"
#include "hetbandit/invariants.hpp"
#include "hetbandit/policy.hpp"
#include "hetbandit/results.hpp"
#include "hetbandit/rng.hpp"
#include "hetbandit/simulator.hpp"
#include "hetbandit/topology.hpp"
