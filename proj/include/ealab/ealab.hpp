#pragma once

#include "ealab/analysis.hpp"
#include "ealab/disorder.hpp"
#include "ealab/enumerate.hpp"
#include "ealab/error.hpp"
#include "ealab/experiments.hpp"
#include "ealab/forest.hpp"
#include "ealab/frustration.hpp"
#include "ealab/gibbs.hpp"
#include "ealab/graph.hpp"
#include "ealab/io.hpp"
#include "ealab/lattice.hpp"
#include "ealab/rng.hpp"
#include "ealab/verify.hpp"
