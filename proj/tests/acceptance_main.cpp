// Acceptance gate: one line per criterion, [PASS]/[FAIL], nonzero exit on
// any failure. Each criterion is self-contained and uses the independent
// oracles from oracles.cpp rather than the library's own logic wherever a
// re-derivation is possible.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "statecast/codec.hpp"
#include "statecast/error.hpp"
#include "statecast/gamestate.hpp"
#include "statecast/metrics.hpp"
#include "statecast/netsim.hpp"
#include "statecast/recovery.hpp"
#include "statecast/scene.hpp"
#include "statecast/scenegen.hpp"

using namespace statecast;
namespace fs = std::filesystem;

namespace {

struct Check {
    std::string failures;
    int checks = 0;

    void require(bool ok, const std::string& what) {
        ++checks;
        if (!ok) {
            if (!failures.empty()) failures += "; ";
            if (failures.size() < 600) failures += what;
        }
    }
};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// ---- shared fixtures ------------------------------------------------------

Palette accept_palette() {
    Palette pal;
    pal[1] = {255, 40, 40};
    pal[2] = {40, 255, 40};
    pal[3] = {60, 60, 255};
    pal[4] = {230, 230, 40};
    return pal;
}

GameStateFrame blob_state(int w, int h, uint64_t seed, int blobs) {
    GameStateFrame s(w, h);
    oracle::TestRng rng(seed);
    for (int b = 0; b < blobs; ++b) {
        int bw = rng.integer(2, 5), bh = rng.integer(2, 5);
        int x0 = rng.integer(0, w - bw), y0 = rng.integer(0, h - bh);
        int color = rng.integer(1, 4);
        float depth = float(rng.real(2.0, 20.0));
        for (int y = y0; y < y0 + bh; ++y)
            for (int x = x0; x < x0 + bw; ++x) {
                size_t i = s.idx(x, y);
                s.occupied[i] = 1;
                s.color_index[i] = color;
                s.depth[i] = depth;
            }
    }
    return s;
}

GameStateFrame shift_state_wrap(const GameStateFrame& src, int dx, int dy) {
    GameStateFrame out(src.width, src.height);
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x) {
            int sx = ((x - dx) % src.width + src.width) % src.width;
            int sy = ((y - dy) % src.height + src.height) % src.height;
            size_t si = src.idx(sx, sy), di = out.idx(x, y);
            out.occupied[di] = src.occupied[si];
            out.color_index[di] = src.color_index[si];
            out.depth[di] = src.depth[si];
        }
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v.empty() ? 0.0 : v[v.size() / 2];
}

// Session fixture shared by criteria 7-10: the toy village over LEO traces.
struct VillageFixture {
    SessionAssets assets;
    std::vector<NetworkTrace> traces; // seeds 1..5
    SchedulerConfig sched;
    bool ready = false;
    std::string error;
};

VillageFixture& village() {
    static VillageFixture fx = [] {
        VillageFixture f;
        try {
            SceneModel scene = make_scene("village_toy", 0, 1);
            CodecConfig codec;
            codec.gop = 4;
            codec.q = 12;
            f.assets = prepare_session_assets(scene, codec, 1);
            double needed_s =
                (f.assets.frame_count * f.sched.frame_interval_ms + 1000.0) / 1000.0;
            double duration = std::max(10.0, needed_s);
            for (uint64_t seed = 1; seed <= 5; ++seed)
                f.traces.push_back(generate_trace("LEO", duration, seed));
            f.ready = true;
        } catch (const std::exception& e) {
            f.error = e.what();
        }
        return f;
    }();
    return fx;
}

double mean_psnr_over_seeds(const Scheme& scheme, std::vector<SessionReport>* out = nullptr) {
    VillageFixture& fx = village();
    double sum = 0.0;
    for (size_t i = 0; i < fx.traces.size(); ++i) {
        uint64_t seed = uint64_t(i) + 1;
        SessionReport rep =
            simulate_session(fx.assets, fx.traces[i], fx.sched, scheme, seed);
        sum += rep.aggregates.mean_psnr_db;
        if (out) out->push_back(std::move(rep));
    }
    return sum / double(fx.traces.size());
}

// ---- criteria -------------------------------------------------------------

// 1. Extraction vs the exhaustive projection oracle on randomized scenes:
//    full-cell equality (covers nearer-wins), static-pose identity, and
//    culling soundness against the brute-force visibility set.
void criterion_projection(Check& c) {
    for (uint64_t seed = 1; seed <= 24; ++seed) {
        int sw = 32 + int(seed % 3) * 16; // 32, 48 or 64 wide
        int sh = 64 - int(seed % 2) * 16;
        SceneModel scene = oracle::random_scene(seed, sw, sh);
        int k = 1 + int(seed % 3);

        GameStateFrame got = extract_state(scene, 0, k, sw, sh);
        std::map<size_t, oracle::CellRef> want =
            oracle::project_all_vertices(scene, 0, k, sw, sh);

        size_t got_cells = 0;
        for (int i = 0; i < sw * sh; ++i) got_cells += got.occupied[size_t(i)] ? 1 : 0;
        c.require(got_cells == want.size(),
                  fmt("scene %llu: %zu cells vs oracle %zu",
                      (unsigned long long)seed, got_cells, want.size()));
        for (const auto& [idx, ref] : want) {
            c.require(got.occupied[idx] != 0, fmt("scene %llu: cell %zu missing",
                                                  (unsigned long long)seed, idx));
            if (!got.occupied[idx]) continue;
            c.require(got.color_index[idx] == ref.color_index &&
                          got.depth[idx] == ref.depth,
                      fmt("scene %llu: cell %zu mismatch", (unsigned long long)seed, idx));
        }

        // Identical poses at frames 0 and 1: extraction must be identical.
        GameStateFrame again = extract_state(scene, 1, k, sw, sh);
        c.require(again.occupied == got.occupied && again.color_index == got.color_index &&
                      again.depth == got.depth,
                  fmt("scene %llu: static identity broken", (unsigned long long)seed));

        // Culling never drops an object that contributes a visible vertex.
        std::set<int> visible = oracle::truly_visible_ids(scene, 0);
        std::vector<int> kept = frustum_cull(scene, 0);
        for (int id : visible)
            c.require(std::binary_search(kept.begin(), kept.end(), id),
                      fmt("scene %llu: culled visible object %d",
                          (unsigned long long)seed, id));
    }
}

// 2. Decoder corruption masks vs the brute-force dependency oracle.
void criterion_codec_oracle(Check& c) {
    int mismatches = 0;
    for (uint64_t inst = 1; inst <= 200; ++inst) {
        oracle::TestRng rng(inst * 7919);
        int w = 16 * rng.integer(1, 8); // up to 128
        int h = 16 * rng.integer(1, 8);
        int frames = rng.integer(3, 5);
        CodecConfig cfg;
        cfg.gop = rng.integer(1, 8);
        cfg.mtu = rng.integer(550, 1200); // every intra macroblock must fit
        cfg.q = rng.integer(4, 16);

        std::vector<RgbFrame> seq;
        RgbFrame base = oracle::noise_frame(w, h, inst * 31 + 1);
        for (int f = 0; f < frames; ++f) {
            RgbFrame fr(w, h);
            int dx = int(rng.integer(-5, 5)) * f, dy = int(rng.integer(-3, 3)) * f;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    int sx = ((x - dx) % w + w) % w, sy = ((y - dy) % h + h) % h;
                    const uint8_t* s = base.at(sx, sy);
                    uint8_t* d = fr.at(x, y);
                    d[0] = s[0];
                    d[1] = s[1];
                    d[2] = s[2];
                }
            seq.push_back(std::move(fr));
        }

        EncodeResult enc = encode(seq, cfg);
        double p = rng.real(0.05, 0.4);
        std::vector<std::set<int>> lost(seq.size());
        std::vector<std::vector<Packet>> packets(seq.size());
        int pid = 0;
        for (size_t f = 0; f < seq.size(); ++f) {
            packets[f] = packetize(enc.frames[f], cfg.mtu, pid);
            pid += int(packets[f].size());
            for (Packet& pk : packets[f])
                if (rng.real01() < p) {
                    pk.lost = true;
                    lost[f].insert(pk.packet_id);
                }
        }

        std::vector<std::vector<uint8_t>> want = oracle::corruption_chain(enc.frames, lost, w, h);

        MaskCache cache;
        const RgbFrame* ref = nullptr;
        const CorruptionMask* ref_mask = nullptr;
        std::vector<RgbFrame> out_frames;
        std::vector<CorruptionMask> out_masks;
        for (size_t f = 0; f < seq.size(); ++f) {
            DecodeOutput out =
                decode_with_mask(enc.frames[f], packets[f], ref, ref_mask, cfg.q, cache);
            out_frames.push_back(std::move(out.frame));
            out_masks.push_back(std::move(out.mask));
            ref = &out_frames.back();
            ref_mask = &out_masks.back();
        }
        for (size_t f = 0; f < seq.size(); ++f)
            if (out_masks[f].corrupt != want[f]) ++mismatches;
    }
    c.require(mismatches == 0, fmt("%d corrupt-mask mismatches", mismatches));
}

// 3. q=1 all-I coding is bit-exact with all-valid masks.
void criterion_lossless(Check& c) {
    std::vector<RgbFrame> seq;
    for (uint64_t s = 1; s <= 3; ++s) seq.push_back(oracle::noise_frame(64, 64, s));
    SceneModel scene = make_scene("pan", 3, 2);
    for (int f = 0; f < 3; ++f) seq.push_back(render_ground_truth(scene, f));

    CodecConfig cfg;
    cfg.gop = 1;
    cfg.q = 1;
    EncodeResult enc = encode(seq, cfg);
    MaskCache cache;
    for (size_t f = 0; f < seq.size(); ++f) {
        c.require(enc.frames[f].kind == 'I', fmt("frame %zu not an I frame", f));
        c.require(enc.reconstructions[f] == seq[f], fmt("frame %zu reconstruction", f));
        std::vector<Packet> packets = packetize(enc.frames[f], cfg.mtu, 0);
        DecodeOutput out = decode_with_mask(enc.frames[f], packets, nullptr, nullptr, 1, cache);
        c.require(out.frame == seq[f], fmt("frame %zu decode not bit-exact", f));
        c.require(out.mask.all_valid(), fmt("frame %zu mask not all-valid", f));
    }
}

// 4. Recovery identity chain.
void criterion_recovery_identity(Check& c) {
    Palette pal = accept_palette();
    GameStateFrame s = blob_state(64, 32, 21, 40);
    RgbFrame prev = oracle::noise_frame(128, 64, 22);
    RecoveryInput in;
    in.prev_state = &s;
    in.curr_state = &s;
    in.palette = &pal;
    in.prev_frame = &prev;
    RecoveryResult res = recover(in, {});
    c.require(res.frame == prev, "static chain did not return the previous frame");

    RgbFrame partial = oracle::noise_frame(128, 64, 23);
    CorruptionMask mask = CorruptionMask::for_frame(128, 64);
    GameStateFrame s2 = shift_state_wrap(s, 1, 0);
    in.curr_state = &s2;
    in.partial_frame = &partial;
    in.partial_mask = &mask;
    RecoveryResult res2 = recover(in, {});
    c.require(res2.frame == partial, "all-valid partial frame not returned verbatim");
}

// 5. Charbonnier analytic gradient vs finite differences; affine fit.
void criterion_enhance(Check& c) {
    for (double mag : {0.0, 1e-6, 0.5, 100.0}) {
        for (double x : {mag, -mag}) {
            double h = std::max(std::abs(x), 1e-6) * 1e-3;
            double fd = (charbonnier_rho(x + h) - charbonnier_rho(x - h)) / (2.0 * h);
            double an = charbonnier_drho(x);
            double rel = std::abs(fd - an) / std::max(std::abs(an), 1e-12);
            c.require(rel <= 1e-5, fmt("gradient at %g off by %g relative", x, rel));
        }
    }

    for (double bias : {10.0, -6.0}) {
        RgbFrame warped = oracle::noise_frame(48, 48, 24);
        for (auto& v : warped.pixels) v = uint8_t(20 + (v % 201));
        RgbFrame partial = warped;
        for (auto& v : partial.pixels) v = uint8_t(int(v) + int(bias));
        PixelMask all(48, 48, 1);
        EnhanceParams p = fit_enhance(warped, partial, all, {});
        for (int ch = 0; ch < 3; ++ch) {
            c.require(std::abs(p.a[ch] - 1.0) <= 0.1,
                      fmt("bias %g: a[%d]=%g", bias, ch, p.a[ch]));
            c.require(std::abs(p.b[ch] - bias) <= 0.5,
                      fmt("bias %g: b[%d]=%g", bias, ch, p.b[ch]));
        }
    }
}

// 6. Flow accuracy on constructed motion.
void criterion_flow(Check& c) {
    Palette pal = accept_palette();
    GameStateFrame prev = blob_state(64, 32, 9, 40);
    GameStateFrame curr = shift_state_wrap(prev, 2, 0);
    FlowField flow = estimate_flow(prev, curr, pal, 3);
    std::vector<double> us, vs;
    for (int y = 0; y < curr.height; ++y)
        for (int x = 0; x < curr.width; ++x)
            if (curr.cell_occupied(x, y)) {
                us.push_back(flow.u[flow.idx(x, y)]);
                vs.push_back(flow.v[flow.idx(x, y)]);
            }
    c.require(std::abs(median(us) - 2.0) <= 0.5, fmt("translation u median %g", median(us)));
    c.require(std::abs(median(vs)) <= 0.5, fmt("translation v median %g", median(vs)));

    const int w = 64, h = 64;
    GameStateFrame p2(w, h), c2(w, h);
    oracle::TestRng rng(31);
    auto stamp = [](GameStateFrame& s, int x0, int y0, int bw, int bh, int color) {
        for (int y = y0; y < y0 + bh; ++y)
            for (int x = x0; x < x0 + bw; ++x) {
                size_t i = s.idx(x, y);
                s.occupied[i] = 1;
                s.color_index[i] = color;
                s.depth[i] = 5.f;
            }
    };
    for (int b = 0; b < 12; ++b) {
        int bw = rng.integer(2, 4), bh = rng.integer(2, 4);
        int x0 = rng.integer(4, 24 - bw), y0 = rng.integer(4, h - 8 - bh);
        int color = rng.integer(1, 4);
        stamp(p2, x0, y0, bw, bh, color);
        stamp(c2, x0 + 3, y0, bw, bh, color);
    }
    for (int b = 0; b < 12; ++b) {
        int bw = rng.integer(2, 4), bh = rng.integer(2, 4);
        int x0 = rng.integer(36, w - 4 - bw), y0 = rng.integer(4, h - 8 - bh);
        int color = rng.integer(1, 4);
        stamp(p2, x0, y0, bw, bh, color);
        stamp(c2, x0, y0 + 3, bw, bh, color);
    }
    FlowField f2 = estimate_flow(p2, c2, pal, 3);
    std::vector<double> lu, lv, ru, rv;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!c2.cell_occupied(x, y)) continue;
            if (x < w / 2) {
                lu.push_back(f2.u[f2.idx(x, y)]);
                lv.push_back(f2.v[f2.idx(x, y)]);
            } else {
                ru.push_back(f2.u[f2.idx(x, y)]);
                rv.push_back(f2.v[f2.idx(x, y)]);
            }
        }
    c.require(std::abs(median(lu) - 3.0) <= 1.0, fmt("left u median %g", median(lu)));
    c.require(std::abs(median(lv)) <= 1.0, fmt("left v median %g", median(lv)));
    c.require(std::abs(median(ru)) <= 1.0, fmt("right u median %g", median(ru)));
    c.require(std::abs(median(rv) - 3.0) <= 1.0, fmt("right v median %g", median(rv)));
}

// 7. Scheme ordering on the toy village across 5 LEO seeds.
void criterion_ordering(Check& c, std::string& extra) {
    VillageFixture& fx = village();
    if (!fx.ready) {
        c.require(false, "fixture: " + fx.error);
        return;
    }
    double rec = mean_psnr_over_seeds(Scheme::parse("recover"));
    double nos = mean_psnr_over_seeds(Scheme::parse("no-states"));
    double reuse = mean_psnr_over_seeds(Scheme::parse("reuse"));
    extra = fmt("recover %.3f > no-states %.3f > reuse %.3f dB", rec, nos, reuse);
    c.require(rec > nos, fmt("recover %.3f !> no-states %.3f", rec, nos));
    c.require(nos > reuse, fmt("no-states %.3f !> reuse %.3f", nos, reuse));
}

// 8. Recovery vs 70%-overhead FEC on the same traces.
void criterion_fec(Check& c, std::string& extra) {
    VillageFixture& fx = village();
    if (!fx.ready) {
        c.require(false, "fixture: " + fx.error);
        return;
    }
    std::vector<SessionReport> rec_reports, fec_reports;
    double rec = mean_psnr_over_seeds(Scheme::parse("recover"), &rec_reports);
    double fec = mean_psnr_over_seeds(Scheme::parse("fec:70"), &fec_reports);
    extra = fmt("recover %.3f dB vs fec:70 %.3f dB", rec, fec);
    c.require(rec >= fec, fmt("recover %.3f < fec:70 %.3f", rec, fec));
    for (const SessionReport& r : rec_reports)
        c.require(r.aggregates.bytes_overhead == 0.0, "recovery charged byte overhead");
    for (const SessionReport& r : fec_reports)
        c.require(r.aggregates.bytes_overhead > 0.0, "fec overhead missing");
}

// 9. Display-latency bound for recovered frames; default timeout value.
void criterion_timing(Check& c) {
    SchedulerConfig sched;
    LatencyModel lat;
    c.require(sched.timeout(lat) == 58.0, fmt("default timeout %g", sched.timeout(lat)));

    VillageFixture& fx = village();
    if (!fx.ready) {
        c.require(false, "fixture: " + fx.error);
        return;
    }
    double bound = sched.deadline_ms() + 1e-9;
    for (const char* name : {"recover", "no-states"}) {
        Scheme scheme = Scheme::parse(name);
        for (size_t i = 0; i < fx.traces.size(); ++i) {
            SessionReport rep = simulate_session(fx.assets, fx.traces[i], fx.sched, scheme,
                                                 uint64_t(i) + 1);
            for (const FrameRecord& r : rep.rows)
                if (r.status == FrameStatus::PartialRecovered ||
                    r.status == FrameStatus::Predicted)
                    c.require(r.display_ms <= bound,
                              fmt("%s frame %d shown at %.2f ms", name, r.frame_index,
                                  r.display_ms));
        }
    }
}

// 10. Byte-identical repeat of an end-to-end run.
void criterion_determinism(Check& c) {
    VillageFixture& fx = village();
    if (!fx.ready) {
        c.require(false, "fixture: " + fx.error);
        return;
    }
    fs::path dir = fs::temp_directory_path() / "statecast_acceptance";
    fs::create_directories(dir);

    std::vector<RgbFrame> frames_a, frames_b;
    SessionReport a = simulate_session(fx.assets, fx.traces[0], fx.sched,
                                       Scheme::parse("recover"), 1, {}, {}, &frames_a);
    SessionReport b = simulate_session(fx.assets, fx.traces[0], fx.sched,
                                       Scheme::parse("recover"), 1, {}, {}, &frames_b);
    c.require(frames_a.size() == frames_b.size(), "frame counts differ");
    for (size_t i = 0; i < std::min(frames_a.size(), frames_b.size()); ++i)
        c.require(frames_a[i] == frames_b[i], fmt("frame %zu differs", i));

    std::string pa = (dir / "run_a.csv").string(), pb = (dir / "run_b.csv").string();
    save_report_csv(a, pa);
    save_report_csv(b, pb);
    auto read = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    std::string ba = read(pa), bb = read(pb);
    c.require(!ba.empty() && ba == bb, "report bytes differ between runs");
}

// 11. Generated trace statistics vs the profile table over 300 s.
void criterion_trace_stats(Check& c) {
    for (const NetworkProfile& prof : all_profiles()) {
        NetworkTrace t = generate_trace(prof.name, 300.0, 1);
        double thr = 0.0, loss = 0.0;
        for (const TraceRow& r : t.rows) {
            thr += r.throughput_mbps;
            loss += r.loss_rate;
        }
        thr /= double(t.rows.size());
        loss /= double(t.rows.size());
        c.require(std::abs(thr - prof.throughput_mbps) <= 0.15 * prof.throughput_mbps,
                  fmt("%s throughput %.2f vs %.2f", prof.name.c_str(), thr,
                      prof.throughput_mbps));
        c.require(std::abs(loss - prof.loss_rate) <= 0.003,
                  fmt("%s loss %.4f vs %.4f", prof.name.c_str(), loss, prof.loss_rate));
    }
}

} // namespace

int main() {
    struct Entry {
        const char* name;
        double budget_s; // stated runtime bound; 0 = none
        std::function<void(Check&, std::string&)> run;
    };
    auto wrap = [](void (*f)(Check&)) {
        return [f](Check& c, std::string&) { f(c); };
    };
    std::vector<Entry> entries = {
        {"projection and state extraction vs exhaustive oracle", 30.0,
         wrap(criterion_projection)},
        {"decoder corruption masks vs dependency oracle (200 instances)", 120.0,
         wrap(criterion_codec_oracle)},
        {"q=1 all-I round trip is bit-exact and all-valid", 0.0, wrap(criterion_lossless)},
        {"recovery identity chain (static scene, all-valid partial)", 0.0,
         wrap(criterion_recovery_identity)},
        {"charbonnier gradients and affine enhancement fit", 0.0, wrap(criterion_enhance)},
        {"flow accuracy on constructed motion", 0.0, wrap(criterion_flow)},
        {"scheme ordering on the toy village (5 LEO seeds)", 300.0, criterion_ordering},
        {"recovery vs 70% FEC overhead on shared traces", 0.0, criterion_fec},
        {"display-latency bound and default timeout", 0.0, wrap(criterion_timing)},
        {"byte-identical repeated end-to-end run", 0.0, wrap(criterion_determinism)},
        {"trace statistics match the profile table", 0.0, wrap(criterion_trace_stats)},
    };

    int failed = 0;
    for (size_t i = 0; i < entries.size(); ++i) {
        Check c;
        std::string extra;
        auto t0 = std::chrono::steady_clock::now();
        try {
            entries[i].run(c, extra);
        } catch (const std::exception& e) {
            c.require(false, std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (entries[i].budget_s > 0.0)
            c.require(secs <= entries[i].budget_s,
                      fmt("took %.1f s, budget %.0f s", secs, entries[i].budget_s));
        bool ok = c.failures.empty();
        failed += ok ? 0 : 1;
        std::printf("[%s] %2zu. %s (%d checks, %.1f s)%s%s\n", ok ? "PASS" : "FAIL", i + 1,
                    entries[i].name, c.checks, secs, extra.empty() ? "" : " -- ",
                    extra.c_str());
        if (!ok) std::printf("       %s\n", c.failures.c_str());
        std::fflush(stdout);
    }
    if (failed) std::printf("%d of %zu criteria failed\n", failed, entries.size());
    return failed ? 1 : 0;
}
