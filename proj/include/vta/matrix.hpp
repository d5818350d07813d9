#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vta {

// Dense row-major float matrix. Storage is 32-bit; reductions over it
// accumulate in 64-bit (see kernels.hpp).
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<float> data;  // rows * cols, row-major

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0f) {
        if (r < 0 || c < 0) throw std::invalid_argument("Matrix: negative shape");
    }
    Matrix(int r, int c, std::vector<float> d) : rows(r), cols(c), data(std::move(d)) {
        if (data.size() != static_cast<size_t>(r) * c)
            throw std::invalid_argument("Matrix: data length != rows*cols");
    }

    float* row(int r) { return data.data() + static_cast<size_t>(r) * cols; }
    const float* row(int r) const { return data.data() + static_cast<size_t>(r) * cols; }

    float& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    float at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

inline std::string shape_str(const Matrix& m) {
    return std::to_string(m.rows) + "x" + std::to_string(m.cols);
}

}  // namespace vta
