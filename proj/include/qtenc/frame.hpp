#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtenc {

// One 8-bit luma plane. Dimensions are padded up to multiples of 8 by edge
// replication at load time; the pre-padding geometry is kept for PSNR.
struct FramePlane {
    int width = 0;        // padded
    int height = 0;       // padded
    int orig_width = 0;
    int orig_height = 0;
    int frame_index = 0;
    std::vector<std::uint8_t> samples; // row-major, width*height

    std::uint8_t at(int x, int y) const { return samples[std::size_t(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return samples[std::size_t(y) * width + x]; }
};

// Index of an 8x8 block within a frame.
struct BlockCoord {
    int x = 0;
    int y = 0;
    int t = 0;
};

// Pads to the next multiple of 8 by edge replication; identity when already
// aligned. orig_* keep the input geometry.
FramePlane pad_to_multiple_of_8(FramePlane plane);

// Raw planar 4:2:0, 8-bit. Only luma is kept; chroma bytes are skipped.
// max_frames == 0 reads to end of file.
std::vector<FramePlane> load_yuv(const std::string& path, int width, int height,
                                 int max_frames = 0);

// Writes the pre-padding luma geometry with mid-grey chroma, so a load/write
// cycle round-trips bit-identically.
void write_yuv(const std::string& path, const std::vector<FramePlane>& planes);

// Binary (P5) PGM, maxval 255, as a single frame.
FramePlane load_pgm(const std::string& path);

BlockCoord block_of(const FramePlane& plane, int pixel_x, int pixel_y);

} // namespace qtenc
