#pragma once

#include "fedpart/harness/compare.hpp"
#include "fedpart/harness/config.hpp"
#include "fedpart/harness/csv.hpp"
#include "fedpart/harness/protocol.hpp"
#include "fedpart/harness/sweep.hpp"
