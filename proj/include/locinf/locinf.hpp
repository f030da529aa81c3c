#pragma once

#include "locinf/bandit.hpp"
#include "locinf/branching.hpp"
#include "locinf/component_oracle.hpp"
#include "locinf/errors.hpp"
#include "locinf/experiment.hpp"
#include "locinf/graph_models.hpp"
#include "locinf/rng.hpp"
