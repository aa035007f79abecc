#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "statecast/image.hpp"

namespace statecast {

// Simplified block codec: 16x16 macroblocks, I/P frames, integer-pel full
// search motion compensation against the previous reconstructed frame, and
// flat quantization (value -> round(value / q), dequantize by * q).
//
// Motion vectors store the content displacement from the reference to the
// current frame, so the predictor for a block at pixel (x0, y0) samples the
// reference at (x0 - dx, y0 - dy). Candidate vectors are restricted to
// fully in-bounds reference regions.

inline constexpr int kMbSize = 16;
inline constexpr int kCellSize = 4; // corruption mask granularity in pixels

enum class MbMode : uint8_t { Intra = 0, Inter = 1, Skip = 2 };

struct Macroblock {
    MbMode mode = MbMode::Intra;
    int8_t mv_dx = 0; // Inter only
    int8_t mv_dy = 0;
    std::vector<int16_t> residual; // 16*16*3 quantized values; empty for Skip
};

struct PacketRange {
    int packet_id = 0;
    int first_mb = 0;
    int mb_count = 0;
};

struct EncodedFrame {
    int frame_index = 0;
    char kind = 'I'; // 'I' or 'P'
    int mb_cols = 0;
    int mb_rows = 0;
    std::vector<Macroblock> macroblocks; // raster order
    std::vector<PacketRange> packet_map; // filled by packetize()
};

struct Packet {
    int packet_id = 0;
    int frame_index = 0;
    int payload_bytes = 0;
    bool lost = false;
};

// 4x4-pixel cell grid; a set bit means the cell is corrupt.
struct CorruptionMask {
    int cells_w = 0;
    int cells_h = 0;
    std::vector<uint8_t> corrupt;

    CorruptionMask() = default;
    CorruptionMask(int cw, int ch, bool all_corrupt = false)
        : cells_w(cw), cells_h(ch), corrupt(size_t(cw) * ch, all_corrupt ? 1 : 0) {}

    static CorruptionMask for_frame(int width, int height, bool all_corrupt = false) {
        return CorruptionMask(width / kCellSize, height / kCellSize, all_corrupt);
    }

    uint8_t& at(int cx, int cy) { return corrupt[size_t(cy) * cells_w + cx]; }
    uint8_t at(int cx, int cy) const { return corrupt[size_t(cy) * cells_w + cx]; }

    bool all_valid() const {
        for (uint8_t v : corrupt)
            if (v) return false;
        return true;
    }
    size_t corrupt_count() const {
        size_t n = 0;
        for (uint8_t v : corrupt) n += (v != 0);
        return n;
    }
};

double pixel_loss_rate(const CorruptionMask& mask);

// Mask PGM convention: 255 = valid, 0 = corrupt.
void save_mask(const CorruptionMask& mask, const std::string& path);
CorruptionMask load_mask(const std::string& path);

// Keeps the masks of the most recent frames (default ring depth 10).
class MaskCache {
public:
    explicit MaskCache(int capacity = 10) : capacity_(capacity) {}

    void push(int frame_index, CorruptionMask mask);
    const CorruptionMask* find(int frame_index) const;
    std::vector<int> cached_frames() const; // ascending

private:
    int capacity_;
    std::deque<std::pair<int, CorruptionMask>> entries_;
};

struct CodecConfig {
    int gop = 30;
    int q = 8;
    int mtu = 1200;
    int search_range = 8;    // +-pixels of full search
    int skip_threshold = 64; // zero-motion SAD at or below this becomes Skip
};

struct EncodeResult {
    int width = 0;
    int height = 0;
    std::vector<EncodedFrame> frames;
    // Encoder-side reconstructions; the decoder reproduces these bit-exactly
    // when nothing is lost because both sides run the same rebuild path.
    std::vector<RgbFrame> reconstructions;
};

// Frames must share one geometry with width and height divisible by 16.
// Frame 0 and every gop-th frame are I (all Intra, quantized absolute
// pixels); the rest are P with per-macroblock zero-motion Skip check first,
// then full-search SAD motion estimation against the previous
// reconstruction.
EncodeResult encode(const std::vector<RgbFrame>& frames, const CodecConfig& cfg);

// Modeled wire cost: 4 + 2 * (count of pixels with a nonzero quantized
// residual in any channel), plus 2 for Inter motion vectors.
int macroblock_cost(const Macroblock& mb);

// Greedy slicing of consecutive macroblocks into packets of at most mtu
// modeled bytes. Fills frame.packet_map; packet ids continue from
// first_packet_id. A single macroblock above mtu is an error.
std::vector<Packet> packetize(EncodedFrame& frame, int mtu, int first_packet_id = 0);

struct DecodeOutput {
    RgbFrame frame;
    CorruptionMask mask;
};

// Rebuilds a frame and its corruption mask. A macroblock is corrupt when its
// packet was lost, or when it is Inter/Skip and its motion-compensated
// reference region overlaps any corrupt cell of the reference mask. Corrupt
// macroblocks fall back to the co-located reference pixels (mid-gray for I
// frames). The new mask is pushed into the cache.
DecodeOutput decode_with_mask(const EncodedFrame& frame, const std::vector<Packet>& packets,
                              const RgbFrame* ref_frame, const CorruptionMask* ref_mask,
                              int q, MaskCache& cache);

// Loss-free rebuild used by both encoder and decoder.
RgbFrame reconstruct_frame(const EncodedFrame& frame, const RgbFrame* ref, int q,
                           int width, int height);

struct Bitstream {
    int width = 0;
    int height = 0;
    int gop = 0;
    int q = 0;
    std::vector<EncodedFrame> frames;
};

// Little-endian container, magic "SCV1". Residuals are stored sparse
// (position, value pairs); packet maps are included.
void save_bitstream(const EncodeResult& enc, int gop, int q, const std::string& path);
Bitstream load_bitstream(const std::string& path);

} // namespace statecast
