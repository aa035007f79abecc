#pragma once

// Deterministic fixture scenes. Every generator is a pure function of its
// arguments, so regenerating with the same kind, frame count and seed gives
// byte-identical scene files.
//
//   pan         camera sliding at constant velocity over a box field
//   orbit       camera circling a cluster of boxes
//   two-motion  static camera, two object groups translating independently
//   village_toy 40-object settlement with a 300-pose varying-speed flyover

#include <cstdint>
#include <string>

#include "statecast/scene.hpp"

namespace statecast {

// frames <= 0 picks the kind's default (60, or 300 for village_toy).
SceneModel make_scene(const std::string& kind, int frames, uint64_t seed);

} // namespace statecast
