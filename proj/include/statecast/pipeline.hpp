#pragma once

// Orchestration behind the command-line tool. Each cmd_* function is the
// whole behavior of one subcommand, callable in-process; the CLI layer only
// parses flags into a RunConfig and forwards. Any stage failure surfaces as
// an Error whose message is prefixed with the stage name.

#include <cstdint>
#include <optional>
#include <string>

#include "statecast/netsim.hpp"
#include "statecast/scene.hpp"

namespace statecast {

struct RunConfig {
    std::string scene_path;  // scene file to read (or to write, for scene-gen)
    std::string out_dir;

    // scene-gen
    std::string kind = "pan";
    int frames = -1; // <= 0 means the kind's default

    // extraction and codec knobs
    int downsample_k = 1;
    int gop = 30;
    int q = 8;
    int mtu = 1200;
    int search_range = 8;

    // resolution overrides applied after the scene loads (0 keeps the file's)
    int rgb_width = 0;
    int rgb_height = 0;
    int state_width = 0;
    int state_height = 0;

    // session
    std::string profile = "LEO";
    std::string scheme = "recover";
    uint64_t seed = 1;
    double budget_ms = 80.0;
    double frame_interval_ms = 33.33;
    std::optional<double> timeout_ms;
    std::string trace_path;       // pre-recorded trace CSV; empty = generate
    double trace_duration_s = 0.0; // 0 = long enough for the camera path

    // report subcommand
    std::string schemes = "recover,no-states,reuse";
    int seed_count = 1;
};

CodecConfig codec_config(const RunConfig& cfg);
SchedulerConfig scheduler_config(const RunConfig& cfg);

// Generates the requested fixture and writes it to cfg.scene_path.
void cmd_scene_gen(const RunConfig& cfg);

// Ground-truth frames to out_dir/frame_%06d.ppm.
void cmd_render(const RunConfig& cfg);

// Game states to out_dir/state_%06d.pgm (+ .depth sidecars).
void cmd_extract(const RunConfig& cfg);

// Encodes the rendered frames into out_dir/stream.scv.
void cmd_encode(const RunConfig& cfg);

// Full run: render, extract, encode, simulate one scheme over one trace,
// score. Writes trace.csv, frame_%06d.ppm (displayed), mask_%06d.pgm,
// state_%06d.pgm, stream.scv, report.csv, scores.csv, burst.csv and
// summary.json into out_dir. Returns the report for in-process callers.
SessionReport cmd_pipeline(const RunConfig& cfg);

// Batch comparison: every scheme in cfg.schemes over cfg.seed_count seeded
// traces, shared assets. Writes comparison.csv and summary.json.
void cmd_report(const RunConfig& cfg);

} // namespace statecast
