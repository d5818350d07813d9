#include "vta/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace vta {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts are not supported");

namespace {

void write_u32(std::ostream& os, uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), 4);
}

uint32_t read_u32(std::istream& is) {
    uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 4);
    if (!is) throw std::runtime_error("tensor file: truncated");
    return v;
}

}  // namespace

void write_tensors(const std::string& path, const std::vector<NamedTensor>& tensors) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    os.write("TSTW", 4);
    write_u32(os, static_cast<uint32_t>(tensors.size()));
    for (const auto& t : tensors) {
        if (t.data.size() != t.element_count())
            throw std::runtime_error("tensor '" + t.name + "': data size != product of dims");
        write_u32(os, static_cast<uint32_t>(t.name.size()));
        os.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
        write_u32(os, static_cast<uint32_t>(t.dims.size()));
        for (uint32_t d : t.dims) write_u32(os, d);
        os.write(reinterpret_cast<const char*>(t.data.data()),
                 static_cast<std::streamsize>(t.data.size() * 4));
    }
    if (!os) throw std::runtime_error("write failed: " + path);
}

std::vector<NamedTensor> read_tensors(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "TSTW", 4) != 0)
        throw std::runtime_error("not a TSTW tensor file: " + path);
    const uint32_t count = read_u32(is);
    std::vector<NamedTensor> out(count);
    for (auto& t : out) {
        const uint32_t name_len = read_u32(is);
        t.name.resize(name_len);
        is.read(t.name.data(), name_len);
        const uint32_t rank = read_u32(is);
        t.dims.resize(rank);
        for (auto& d : t.dims) d = read_u32(is);
        t.data.resize(t.element_count());
        is.read(reinterpret_cast<char*>(t.data.data()),
                static_cast<std::streamsize>(t.data.size() * 4));
        if (!is) throw std::runtime_error("tensor file: truncated: " + path);
    }
    return out;
}

const NamedTensor& find_tensor(const std::vector<NamedTensor>& tensors, const std::string& name) {
    for (const auto& t : tensors)
        if (t.name == name) return t;
    throw std::runtime_error("tensor not found: " + name);
}

}  // namespace vta
