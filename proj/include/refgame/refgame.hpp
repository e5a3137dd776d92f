#pragma once

#include "refgame/equilibrium.hpp"
#include "refgame/errors.hpp"
#include "refgame/game.hpp"
#include "refgame/io.hpp"
#include "refgame/rewards.hpp"
#include "refgame/rng.hpp"
#include "refgame/sim.hpp"
#include "refgame/sweep.hpp"
#include "refgame/tree.hpp"
