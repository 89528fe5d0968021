#pragma once

#include "congestion/game.hpp"

namespace congestion {

// (tau / v, d). Leaves the price of anarchy unchanged.
Game cost_normalize(const Game& g, double v);

// (tau(v .), d / v). Leaves the price of anarchy unchanged.
Game demand_normalize(const Game& g, double v);

// Auxiliary game with total demand t_new: demands are rescaled to total t_new
// and every cost is kept on [0, min(T, t_new)] and extended beyond it either
// as a constant or along its tangent.
Game truncate_extend(const Game& g, double t_new,
                     ExtensionMode mode = ExtensionMode::kConstant);

}  // namespace congestion
