#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vta {

// Named float32 tensor container.
// File format: magic "TSTW", u32le tensor count, then per tensor:
//   u32le name length, name bytes,
//   u32le rank, u32le dims[rank],
//   float32le data (product of dims values).
// All integers little-endian.
struct NamedTensor {
    std::string name;
    std::vector<uint32_t> dims;
    std::vector<float> data;

    size_t element_count() const {
        size_t n = 1;
        for (uint32_t d : dims) n *= d;
        return n;
    }
};

void write_tensors(const std::string& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> read_tensors(const std::string& path);

// Lookup by name; throws std::runtime_error if absent.
const NamedTensor& find_tensor(const std::vector<NamedTensor>& tensors, const std::string& name);

}  // namespace vta
