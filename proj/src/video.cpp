#include "vta/video.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace vta {

void write_video(const RawVideo& v, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    os.write("TSTV", 4);
    const uint32_t hdr[3] = {static_cast<uint32_t>(v.frames), static_cast<uint32_t>(v.height),
                             static_cast<uint32_t>(v.width)};
    os.write(reinterpret_cast<const char*>(hdr), sizeof(hdr));
    os.write(reinterpret_cast<const char*>(v.pixels.data()),
             static_cast<std::streamsize>(v.pixels.size() * 4));
    if (!os) throw std::runtime_error("write failed: " + path);
}

RawVideo read_video(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "TSTV", 4) != 0)
        throw std::runtime_error("not a TSTV video file: " + path);
    uint32_t hdr[3];
    is.read(reinterpret_cast<char*>(hdr), sizeof(hdr));
    if (!is) throw std::runtime_error("video file: truncated header: " + path);
    RawVideo v(static_cast<int>(hdr[0]), static_cast<int>(hdr[1]), static_cast<int>(hdr[2]));
    is.read(reinterpret_cast<char*>(v.pixels.data()),
            static_cast<std::streamsize>(v.pixels.size() * 4));
    if (!is) throw std::runtime_error("video file: truncated pixel data: " + path);
    return v;
}

}  // namespace vta
