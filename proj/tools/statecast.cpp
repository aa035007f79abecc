#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "statecast/error.hpp"
#include "statecast/pipeline.hpp"

namespace {

using statecast::RunConfig;

void apply_res(const std::string& text, int& w, int& h, const std::string& flag) {
    size_t x = text.find('x');
    if (x == std::string::npos || x == 0 || x + 1 >= text.size())
        statecast::fail(flag + " expects WxH, got '" + text + "'");
    try {
        w = std::stoi(text.substr(0, x));
        h = std::stoi(text.substr(x + 1));
    } catch (const std::exception&) {
        statecast::fail(flag + " expects WxH, got '" + text + "'");
    }
    if (w <= 0 || h <= 0) statecast::fail(flag + " dimensions must be positive");
}

struct Options {
    RunConfig cfg;
    std::string state_res;
    std::string rgb_res;
    double timeout_ms = -1.0;

    RunConfig resolve(bool timeout_given) {
        if (!state_res.empty())
            apply_res(state_res, cfg.state_width, cfg.state_height, "--state-res");
        if (!rgb_res.empty()) apply_res(rgb_res, cfg.rgb_width, cfg.rgb_height, "--rgb-res");
        if (timeout_given) cfg.timeout_ms = timeout_ms;
        return cfg;
    }
};

void add_seed(CLI::App* sub, Options& o) {
    sub->add_option("--seed", o.cfg.seed, "Deterministic seed")
        ->envname("STATECAST_SEED");
}

void add_scene_io(CLI::App* sub, Options& o, bool need_out) {
    sub->add_option("--scene", o.cfg.scene_path, "Scene file")->required();
    auto* out = sub->add_option("--out", o.cfg.out_dir, "Output directory");
    if (need_out) out->required();
}

void add_res_overrides(CLI::App* sub, Options& o) {
    sub->add_option("--rgb-res", o.rgb_res, "Rendered frame resolution WxH override");
    sub->add_option("--state-res", o.state_res, "Game-state grid resolution WxH override");
}

void add_codec(CLI::App* sub, Options& o) {
    sub->add_option("--gop", o.cfg.gop, "Frames per group of pictures");
    sub->add_option("--q", o.cfg.q, "Residual quantization step");
    sub->add_option("--mtu", o.cfg.mtu, "Packet payload budget in modeled bytes");
    sub->add_option("--search-range", o.cfg.search_range, "Motion search radius in pixels");
}

void add_session(CLI::App* sub, Options& o) {
    sub->add_option("--profile", o.cfg.profile, "Network profile: 4G, 5G, WiFi or LEO");
    sub->add_option("--scheme", o.cfg.scheme,
                    "Delivery scheme: recover, no-states, reuse or fec:<pct>");
    sub->add_option("--budget-ms", o.cfg.budget_ms, "End-to-end latency budget");
    sub->add_option("--timeout-ms", o.timeout_ms,
                    "Recovery timeout (default: budget minus inference time)");
    sub->add_option("--frame-interval-ms", o.cfg.frame_interval_ms, "Frame spacing");
    sub->add_option("--trace", o.cfg.trace_path, "Replay a recorded trace CSV");
    sub->add_option("--duration-s", o.cfg.trace_duration_s,
                    "Generated trace length in seconds");
    sub->add_option("--downsample", o.cfg.downsample_k, "Vertex downsampling stride");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trace-driven cloud-gaming video delivery and recovery simulator"};
    app.require_subcommand(1);
    Options o;

    CLI::App* scene_gen = app.add_subcommand(
        "scene-gen", "Generate a fixture scene (pan, orbit, two-motion, village_toy)");
    scene_gen->add_option("--kind", o.cfg.kind, "Fixture kind");
    scene_gen->add_option("--frames", o.cfg.frames, "Camera pose count");
    scene_gen->add_option("--out", o.cfg.scene_path, "Scene file to write")->required();
    add_seed(scene_gen, o);
    add_res_overrides(scene_gen, o);

    CLI::App* render = app.add_subcommand("render", "Render ground-truth frames to PPM");
    add_scene_io(render, o, true);
    add_res_overrides(render, o);

    CLI::App* extract = app.add_subcommand("extract", "Extract game states to PGM + depth");
    add_scene_io(extract, o, true);
    add_res_overrides(extract, o);
    extract->add_option("--downsample", o.cfg.downsample_k, "Vertex downsampling stride");

    CLI::App* encode = app.add_subcommand("encode", "Encode rendered frames to a bitstream");
    add_scene_io(encode, o, true);
    add_res_overrides(encode, o);
    add_codec(encode, o);

    CLI::App* simulate = app.add_subcommand(
        "simulate", "Run the full pipeline over a network trace and score it");
    add_scene_io(simulate, o, true);
    add_res_overrides(simulate, o);
    add_codec(simulate, o);
    add_session(simulate, o);
    add_seed(simulate, o);

    CLI::App* report = app.add_subcommand(
        "report", "Compare schemes across seeded traces on shared assets");
    add_scene_io(report, o, true);
    add_res_overrides(report, o);
    add_codec(report, o);
    add_session(report, o);
    add_seed(report, o);
    report->add_option("--schemes", o.cfg.schemes, "Comma-separated scheme list");
    report->add_option("--seeds", o.cfg.seed_count, "Number of consecutive seeds");

    CLI11_PARSE(app, argc, argv);

    try {
        bool timeout_given = simulate->count("--timeout-ms") > 0 ||
                             report->count("--timeout-ms") > 0;
        RunConfig cfg = o.resolve(timeout_given);
        if (scene_gen->parsed()) statecast::cmd_scene_gen(cfg);
        if (render->parsed()) statecast::cmd_render(cfg);
        if (extract->parsed()) statecast::cmd_extract(cfg);
        if (encode->parsed()) statecast::cmd_encode(cfg);
        if (simulate->parsed()) statecast::cmd_pipeline(cfg);
        if (report->parsed()) statecast::cmd_report(cfg);
    } catch (const statecast::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
