#pragma once

#include "dsom/core.hpp"
#include "dsom/dissim.hpp"
#include "dsom/error.hpp"
#include "dsom/harness.hpp"
#include "dsom/partition.hpp"
#include "dsom/representation.hpp"
#include "dsom/topology.hpp"
