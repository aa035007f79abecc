#include "statecast/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <utility>

#include "statecast/error.hpp"
#include "statecast/image_io.hpp"
#include "statecast/scenegen.hpp"

#include <json.hpp>

namespace statecast {

namespace {

template <class F>
auto stage(const char* name, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const Error& e) {
        fail(std::string(name) + ": " + e.what());
    }
}

std::string join(const std::string& dir, const std::string& name) {
    if (dir.empty()) return name;
    return dir.back() == '/' ? dir + name : dir + "/" + name;
}

std::string numbered(const std::string& dir, const char* prefix, int index, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%06d.%s", prefix, index, ext);
    return join(dir, buf);
}

void ensure_out_dir(const RunConfig& cfg) {
    if (cfg.out_dir.empty()) fail("output directory not set");
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) fail("cannot create output directory " + cfg.out_dir + ": " + ec.message());
}

SceneModel load_configured_scene(const RunConfig& cfg) {
    if (cfg.scene_path.empty()) fail("scene path not set");
    SceneModel scene = load_scene(cfg.scene_path);
    if (cfg.rgb_width > 0) scene.rgb_width = cfg.rgb_width;
    if (cfg.rgb_height > 0) scene.rgb_height = cfg.rgb_height;
    if (cfg.state_width > 0) scene.state_width = cfg.state_width;
    if (cfg.state_height > 0) scene.state_height = cfg.state_height;
    return scene;
}

NetworkTrace session_trace(const RunConfig& cfg, int frame_count, double frame_interval_ms) {
    if (!cfg.trace_path.empty()) return load_trace_csv(cfg.trace_path);
    double needed_s = (frame_count * frame_interval_ms + 1000.0) / 1000.0;
    double duration = cfg.trace_duration_s > 0.0 ? cfg.trace_duration_s
                                                 : std::max(10.0, needed_s);
    return generate_trace(cfg.profile, duration, cfg.seed);
}

void save_cell_mask_pgm(const CorruptionMask& mask, const std::string& path) {
    std::vector<uint8_t> data(mask.corrupt.size());
    for (size_t i = 0; i < data.size(); ++i) data[i] = mask.corrupt[i] ? 0 : 255;
    save_pgm(data, mask.cells_w, mask.cells_h, path);
}

} // namespace

CodecConfig codec_config(const RunConfig& cfg) {
    CodecConfig codec;
    codec.gop = cfg.gop;
    codec.q = cfg.q;
    codec.mtu = cfg.mtu;
    codec.search_range = cfg.search_range;
    return codec;
}

SchedulerConfig scheduler_config(const RunConfig& cfg) {
    SchedulerConfig sched;
    sched.budget_ms = cfg.budget_ms;
    sched.frame_interval_ms = cfg.frame_interval_ms;
    sched.timeout_ms = cfg.timeout_ms;
    return sched;
}

void cmd_scene_gen(const RunConfig& cfg) {
    stage("scene-gen", [&] {
        if (cfg.scene_path.empty()) fail("scene output path not set");
        SceneModel scene = make_scene(cfg.kind, cfg.frames, cfg.seed);
        if (cfg.rgb_width > 0) scene.rgb_width = cfg.rgb_width;
        if (cfg.rgb_height > 0) scene.rgb_height = cfg.rgb_height;
        if (cfg.state_width > 0) scene.state_width = cfg.state_width;
        if (cfg.state_height > 0) scene.state_height = cfg.state_height;
        save_scene(scene, cfg.scene_path);
    });
}

void cmd_render(const RunConfig& cfg) {
    stage("render", [&] {
        SceneModel scene = load_configured_scene(cfg);
        ensure_out_dir(cfg);
        for (int f = 0; f < int(scene.camera_path.size()); ++f)
            save_ppm(render_ground_truth(scene, f), numbered(cfg.out_dir, "frame", f, "ppm"));
    });
}

void cmd_extract(const RunConfig& cfg) {
    stage("extract", [&] {
        SceneModel scene = load_configured_scene(cfg);
        ensure_out_dir(cfg);
        for (int f = 0; f < int(scene.camera_path.size()); ++f) {
            GameStateFrame state = extract_state(scene, f, cfg.downsample_k,
                                                 scene.state_width, scene.state_height);
            save_state(state, numbered(cfg.out_dir, "state", f, "pgm"));
        }
    });
}

void cmd_encode(const RunConfig& cfg) {
    stage("encode", [&] {
        SceneModel scene = load_configured_scene(cfg);
        ensure_out_dir(cfg);
        std::vector<RgbFrame> frames;
        frames.reserve(scene.camera_path.size());
        for (int f = 0; f < int(scene.camera_path.size()); ++f)
            frames.push_back(render_ground_truth(scene, f));
        EncodeResult enc = encode(frames, codec_config(cfg));
        save_bitstream(enc, cfg.gop, cfg.q, join(cfg.out_dir, "stream.scv"));
    });
}

SessionReport cmd_pipeline(const RunConfig& cfg) {
    SceneModel scene = stage("load", [&] { return load_configured_scene(cfg); });
    ensure_out_dir(cfg);

    SessionAssets assets = stage("prepare", [&] {
        return prepare_session_assets(scene, codec_config(cfg), cfg.downsample_k);
    });
    SchedulerConfig sched = scheduler_config(cfg);
    Scheme scheme = Scheme::parse(cfg.scheme);
    NetworkTrace trace = stage("trace", [&] {
        return session_trace(cfg, assets.frame_count, sched.frame_interval_ms);
    });

    std::vector<RgbFrame> frames;
    std::vector<CorruptionMask> masks;
    SessionReport report = stage("simulate", [&] {
        return simulate_session(assets, trace, sched, scheme, cfg.seed, LatencyModel{},
                                RecoverConfig{}, &frames, &masks);
    });

    stage("report", [&] {
        save_trace_csv(trace, join(cfg.out_dir, "trace.csv"));
        save_bitstream(assets.enc, cfg.gop, cfg.q, join(cfg.out_dir, "stream.scv"));
        for (int f = 0; f < assets.frame_count; ++f) {
            save_ppm(frames[size_t(f)], numbered(cfg.out_dir, "frame", f, "ppm"));
            save_cell_mask_pgm(masks[size_t(f)], numbered(cfg.out_dir, "mask", f, "pgm"));
            save_state(assets.states[size_t(f)], numbered(cfg.out_dir, "state", f, "pgm"));
        }
        save_report_csv(report, join(cfg.out_dir, "report.csv"));
        save_report_json(report, join(cfg.out_dir, "summary.json"));
        save_burst_csv(burst_report(report), join(cfg.out_dir, "burst.csv"));
        std::vector<FrameScore> scores;
        scores.reserve(report.rows.size());
        for (const FrameRecord& r : report.rows)
            scores.push_back({r.frame_index, r.psnr_db, r.ssim, r.pixel_loss});
        save_scores_csv(scores, report.scheme, join(cfg.out_dir, "scores.csv"));
        return 0;
    });
    return report;
}

void cmd_report(const RunConfig& cfg) {
    SceneModel scene = stage("load", [&] { return load_configured_scene(cfg); });
    ensure_out_dir(cfg);
    SessionAssets assets = stage("prepare", [&] {
        return prepare_session_assets(scene, codec_config(cfg), cfg.downsample_k);
    });
    SchedulerConfig sched = scheduler_config(cfg);
    if (cfg.seed_count < 1) fail("report: seed count must be at least 1");

    std::vector<Scheme> schemes;
    std::stringstream ss(cfg.schemes);
    std::string token;
    while (std::getline(ss, token, ','))
        if (!token.empty()) schemes.push_back(Scheme::parse(token));
    if (schemes.empty()) fail("report: no schemes given");

    std::string out = "scheme,seed,mean_psnr_db,mean_ssim,mean_pixel_loss,conditional_loss,"
                      "bytes_sent,bytes_overhead\n";
    nlohmann::json summary;
    for (const Scheme& scheme : schemes) {
        double sum_psnr = 0.0, sum_ssim = 0.0;
        for (int i = 0; i < cfg.seed_count; ++i) {
            uint64_t seed = cfg.seed + uint64_t(i);
            // Each seed gets its own generated trace; a fixed trace file is
            // shared across all seeds as-is.
            NetworkTrace trace = stage("trace", [&] {
                if (!cfg.trace_path.empty()) return load_trace_csv(cfg.trace_path);
                double needed_s =
                    (assets.frame_count * sched.frame_interval_ms + 1000.0) / 1000.0;
                double duration = cfg.trace_duration_s > 0.0 ? cfg.trace_duration_s
                                                             : std::max(10.0, needed_s);
                return generate_trace(cfg.profile, duration, seed);
            });
            SessionReport rep = stage("simulate", [&] {
                return simulate_session(assets, trace, sched, scheme, seed);
            });
            const SessionAggregates& a = rep.aggregates;
            char buf[256];
            std::snprintf(buf, sizeof buf, "%s,%llu,%.6f,%.6f,%.6f,%.6f,%.1f,%.1f\n",
                          rep.scheme.c_str(), static_cast<unsigned long long>(seed),
                          a.mean_psnr_db, a.mean_ssim, a.mean_pixel_loss, a.conditional_loss,
                          a.bytes_sent, a.bytes_overhead);
            out += buf;
            sum_psnr += a.mean_psnr_db;
            sum_ssim += a.mean_ssim;
        }
        summary[scheme.label()] = {
            {"mean_psnr_db", sum_psnr / cfg.seed_count},
            {"mean_ssim", sum_ssim / cfg.seed_count},
            {"seeds", cfg.seed_count},
        };
    }
    stage("report", [&] {
        write_file_bytes(join(cfg.out_dir, "comparison.csv"), out);
        std::string text = summary.dump(2);
        text += '\n';
        write_file_bytes(join(cfg.out_dir, "summary.json"), text);
        return 0;
    });
}

} // namespace statecast
