#include "statecast/image_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include "statecast/error.hpp"

namespace statecast {

std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open file: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

void write_file_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail("cannot write file: " + path);
    out.write(bytes.data(), std::streamsize(bytes.size()));
    if (!out) fail("short write: " + path);
}

namespace {

// Skips whitespace and '#' comments between netpbm header tokens.
void skip_pnm_space(const std::string& s, size_t& pos) {
    while (pos < s.size()) {
        char c = s[pos];
        if (c == '#') {
            while (pos < s.size() && s[pos] != '\n') ++pos;
        } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++pos;
        } else {
            break;
        }
    }
}

int read_pnm_int(const std::string& s, size_t& pos, const std::string& path) {
    skip_pnm_space(s, pos);
    size_t start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == start) fail("malformed netpbm header: " + path);
    return std::stoi(s.substr(start, pos - start));
}

std::vector<uint8_t> load_pnm(const std::string& path, const char* magic, int channels,
                              int& width, int& height) {
    std::string bytes = read_file_bytes(path);
    if (bytes.size() < 2 || bytes[0] != magic[0] || bytes[1] != magic[1])
        fail(std::string("not a ") + magic + " file: " + path);
    size_t pos = 2;
    width = read_pnm_int(bytes, pos, path);
    height = read_pnm_int(bytes, pos, path);
    int maxval = read_pnm_int(bytes, pos, path);
    if (width <= 0 || height <= 0 || maxval != 255)
        fail("unsupported netpbm geometry or maxval: " + path);
    // Exactly one whitespace byte separates the header from the raster.
    if (pos >= bytes.size()) fail("truncated netpbm file: " + path);
    ++pos;
    size_t need = size_t(width) * height * channels;
    if (bytes.size() - pos < need) fail("truncated netpbm raster: " + path);
    std::vector<uint8_t> data(need);
    std::memcpy(data.data(), bytes.data() + pos, need);
    return data;
}

} // namespace

void save_ppm(const RgbFrame& frame, const std::string& path) {
    char header[64];
    int n = std::snprintf(header, sizeof header, "P6\n%d %d\n255\n", frame.width, frame.height);
    std::string bytes(header, size_t(n));
    bytes.append(reinterpret_cast<const char*>(frame.pixels.data()), frame.pixels.size());
    write_file_bytes(path, bytes);
}

RgbFrame load_ppm(const std::string& path) {
    RgbFrame frame;
    auto data = load_pnm(path, "P6", 3, frame.width, frame.height);
    frame.pixels = std::move(data);
    return frame;
}

void save_pgm(const std::vector<uint8_t>& data, int width, int height, const std::string& path) {
    if (data.size() != size_t(width) * height) fail("pgm payload size mismatch: " + path);
    char header[64];
    int n = std::snprintf(header, sizeof header, "P5\n%d %d\n255\n", width, height);
    std::string bytes(header, size_t(n));
    bytes.append(reinterpret_cast<const char*>(data.data()), data.size());
    write_file_bytes(path, bytes);
}

std::vector<uint8_t> load_pgm(const std::string& path, int& width, int& height) {
    return load_pnm(path, "P5", 1, width, height);
}

void save_f32(const std::vector<float>& data, const std::string& path) {
    static_assert(sizeof(float) == 4);
    std::string bytes;
    bytes.resize(data.size() * 4);
    // Little-endian byte order regardless of host.
    for (size_t i = 0; i < data.size(); ++i) {
        uint32_t u;
        std::memcpy(&u, &data[i], 4);
        bytes[i * 4 + 0] = char(u & 0xff);
        bytes[i * 4 + 1] = char((u >> 8) & 0xff);
        bytes[i * 4 + 2] = char((u >> 16) & 0xff);
        bytes[i * 4 + 3] = char((u >> 24) & 0xff);
    }
    write_file_bytes(path, bytes);
}

std::vector<float> load_f32(const std::string& path, size_t expected_count) {
    std::string bytes = read_file_bytes(path);
    if (bytes.size() != expected_count * 4) fail("unexpected float payload size: " + path);
    std::vector<float> data(expected_count);
    for (size_t i = 0; i < expected_count; ++i) {
        uint32_t u = uint32_t(uint8_t(bytes[i * 4 + 0])) |
                     uint32_t(uint8_t(bytes[i * 4 + 1])) << 8 |
                     uint32_t(uint8_t(bytes[i * 4 + 2])) << 16 |
                     uint32_t(uint8_t(bytes[i * 4 + 3])) << 24;
        std::memcpy(&data[i], &u, 4);
    }
    return data;
}

} // namespace statecast
