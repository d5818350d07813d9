#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace vta {

// T RGB frames, pixel values in [0, 1], layout [t][y][x][c] (channel-last).
struct RawVideo {
    int frames = 0;
    int height = 0;
    int width = 0;
    std::vector<float> pixels;  // frames * height * width * 3

    RawVideo() = default;
    RawVideo(int t, int h, int w)
        : frames(t), height(h), width(w),
          pixels(static_cast<size_t>(t) * h * w * 3, 0.0f) {}

    size_t index(int t, int y, int x, int c) const {
        return ((static_cast<size_t>(t) * height + y) * width + x) * 3 + c;
    }
    float at(int t, int y, int x, int c) const { return pixels[index(t, y, x, c)]; }
    float& at(int t, int y, int x, int c) { return pixels[index(t, y, x, c)]; }
};

// File format: magic "TSTV", u32le frames, u32le height, u32le width, then
// frames*height*width*3 float32le values in [t][y][x][c] order.
void write_video(const RawVideo& v, const std::string& path);
RawVideo read_video(const std::string& path);

}  // namespace vta
