#pragma once

#include "fedpart/decomposition.hpp"
#include "fedpart/equilibrium.hpp"
#include "fedpart/error.hpp"
#include "fedpart/error_model.hpp"
#include "fedpart/game_model.hpp"
#include "fedpart/lp.hpp"
#include "fedpart/mechanism.hpp"
#include "fedpart/random.hpp"
