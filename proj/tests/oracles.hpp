#pragma once

// Reference implementations used by the test suites. Everything in here
// recomputes results from first principles with its own arithmetic (matrix
// products, dependency walks, scalar loops) so that a defect in the library
// cannot hide inside the checker that is supposed to catch it.

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "statecast/codec.hpp"
#include "statecast/gamestate.hpp"
#include "statecast/image.hpp"
#include "statecast/scene.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// Projection / game state

struct CellRef {
    int color_index = 0;
    float depth = 0.f;
};

// Projects every k-th vertex of every object (deliberately skipping the
// culling stage) and keeps the nearest writer per cell. Keys are cell
// indices y * w + x. Agreement with extract_state proves both the projection
// math and that culling never removed a contributing object.
std::map<size_t, CellRef> project_all_vertices(const statecast::SceneModel& scene, int frame,
                                               int k, int w, int h);

// Ids of objects with at least one full-stride vertex that survives every
// projection filter: the set frustum_cull must never drop from.
std::set<int> truly_visible_ids(const statecast::SceneModel& scene, int frame);

// ---------------------------------------------------------------------------
// Codec

// Corruption propagation by brute force: per frame, a macroblock is bad when
// its packet was lost or when any of its 16 4x4 sub-blocks reads a reference
// patch that touches a bad cell of the previous mask. Returns one cell grid
// (1 = corrupt) per frame; lost[f] holds the packet ids lost for frame f.
std::vector<std::vector<uint8_t>> corruption_chain(
    const std::vector<statecast::EncodedFrame>& frames,
    const std::vector<std::set<int>>& lost, int width, int height);

// Independent recount of a frame's modeled wire bytes.
long recount_frame_bytes(const statecast::EncodedFrame& frame);

// ---------------------------------------------------------------------------
// Metrics

// Plain scalar loop over interleaved channel values.
double charbonnier_scalar(const statecast::RgbFrame& a, const statecast::RgbFrame& b);

// ---------------------------------------------------------------------------
// Deterministic fixtures

// Tiny self-contained generator so fixtures do not depend on the library's
// RNG being correct.
struct TestRng {
    uint64_t state;
    explicit TestRng(uint64_t seed) : state(seed) {}
    uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double real01() { return double(next() >> 11) * 0x1.0p-53; }
    double real(double lo, double hi) { return lo + (hi - lo) * real01(); }
    int integer(int lo, int hi) { return lo + int(next() % uint64_t(hi - lo + 1)); }
};

statecast::RgbFrame noise_frame(int w, int h, uint64_t seed);

// Random triangle-soup scene: a handful of objects scattered around and
// behind a perspective camera, two identical poses (so frames 0 and 1 form a
// static pair). State resolution is capped by the caller.
statecast::SceneModel random_scene(uint64_t seed, int state_w, int state_h);

} // namespace oracle
