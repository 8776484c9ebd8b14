#include "qtenc/frame.hpp"

#include <cstdio>
#include <fstream>

namespace qtenc {

FramePlane pad_to_multiple_of_8(FramePlane plane) {
    int pw = (plane.width + 7) / 8 * 8;
    int ph = (plane.height + 7) / 8 * 8;
    if (pw == plane.width && ph == plane.height)
        return plane;
    FramePlane out;
    out.width = pw;
    out.height = ph;
    out.orig_width = plane.orig_width;
    out.orig_height = plane.orig_height;
    out.frame_index = plane.frame_index;
    out.samples.resize(std::size_t(pw) * ph);
    for (int y = 0; y < ph; ++y) {
        int sy = y < plane.height ? y : plane.height - 1;
        for (int x = 0; x < pw; ++x) {
            int sx = x < plane.width ? x : plane.width - 1;
            out.at(x, y) = plane.at(sx, sy);
        }
    }
    return out;
}

std::vector<FramePlane> load_yuv(const std::string& path, int width, int height,
                                 int max_frames) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("load_yuv: dimensions must be positive");
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("load_yuv: cannot open " + path);

    std::size_t luma_bytes = std::size_t(width) * height;
    std::size_t chroma_bytes = 2 * (std::size_t(width / 2) * (height / 2));
    std::vector<FramePlane> frames;
    std::vector<char> chroma(chroma_bytes);
    for (int t = 0; max_frames == 0 || t < max_frames; ++t) {
        FramePlane plane;
        plane.width = width;
        plane.height = height;
        plane.orig_width = width;
        plane.orig_height = height;
        plane.frame_index = t;
        plane.samples.resize(luma_bytes);
        in.read(reinterpret_cast<char*>(plane.samples.data()), std::streamsize(luma_bytes));
        if (in.gcount() == 0 && max_frames == 0)
            break;
        if (std::size_t(in.gcount()) != luma_bytes)
            throw std::runtime_error("load_yuv: truncated luma data at frame " + std::to_string(t));
        in.read(chroma.data(), std::streamsize(chroma_bytes));
        if (std::size_t(in.gcount()) != chroma_bytes)
            throw std::runtime_error("load_yuv: truncated chroma data at frame " + std::to_string(t));
        frames.push_back(pad_to_multiple_of_8(std::move(plane)));
    }
    return frames;
}

void write_yuv(const std::string& path, const std::vector<FramePlane>& planes) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("write_yuv: cannot open " + path);
    for (const FramePlane& p : planes) {
        for (int y = 0; y < p.orig_height; ++y)
            out.write(reinterpret_cast<const char*>(p.samples.data() + std::size_t(y) * p.width),
                      p.orig_width);
        std::size_t chroma_bytes = 2 * (std::size_t(p.orig_width / 2) * (p.orig_height / 2));
        std::vector<char> chroma(chroma_bytes, char(128));
        out.write(chroma.data(), std::streamsize(chroma_bytes));
    }
}

FramePlane load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("load_pgm: cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5")
        throw std::runtime_error("load_pgm: not a binary PGM: " + path);
    auto next_token = [&in, &path]() {
        // skip whitespace and '#' comments
        int tok;
        for (;;) {
            in >> std::ws;
            if (in.peek() == '#') {
                std::string line;
                std::getline(in, line);
                continue;
            }
            if (!(in >> tok))
                throw std::runtime_error("load_pgm: malformed header: " + path);
            return tok;
        }
    };
    int w = next_token();
    int h = next_token();
    int maxval = next_token();
    if (w <= 0 || h <= 0 || maxval != 255)
        throw std::runtime_error("load_pgm: unsupported geometry or maxval: " + path);
    in.get(); // single whitespace after maxval
    FramePlane plane;
    plane.width = w;
    plane.height = h;
    plane.orig_width = w;
    plane.orig_height = h;
    plane.samples.resize(std::size_t(w) * h);
    in.read(reinterpret_cast<char*>(plane.samples.data()), std::streamsize(plane.samples.size()));
    if (std::size_t(in.gcount()) != plane.samples.size())
        throw std::runtime_error("load_pgm: truncated pixel data: " + path);
    return pad_to_multiple_of_8(std::move(plane));
}

BlockCoord block_of(const FramePlane& plane, int pixel_x, int pixel_y) {
    if (pixel_x < 0 || pixel_y < 0 || pixel_x >= plane.width || pixel_y >= plane.height)
        throw std::invalid_argument("block_of: pixel outside plane");
    return BlockCoord{pixel_x / 8, pixel_y / 8, plane.frame_index};
}

} // namespace qtenc
